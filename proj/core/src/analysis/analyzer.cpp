#include "sgforge/analysis/analyzer.hpp"

#include <algorithm>
#include <chrono>
#include <tuple>

#include "sgforge/analysis/python_lexer.hpp"
#include "sgforge/analysis/rules.hpp"
#include "sgforge/digest.hpp"
#include "sgforge/error.hpp"

namespace sgforge::analysis {

std::string_view to_string(Level level) {
  switch (level) {
    case Level::Low: return "LOW";
    case Level::Medium: return "MEDIUM";
    case Level::High: return "HIGH";
  }
  return "LOW";
}

Level parse_level(std::string_view text) {
  if (text == "LOW") return Level::Low;
  if (text == "MEDIUM") return Level::Medium;
  if (text == "HIGH") return Level::High;
  throw std::invalid_argument("unknown level: " + std::string(text));
}

AnalysisResult analyze(std::string_view source) {
  if (!is_valid_utf8(source)) throw UnreadableSource("source is not valid UTF-8");

  AnalysisResult result;
  result.analyzer_name = std::string(kBuiltinAnalyzerName);
  result.source_fingerprint = sha256_hex(source);

  const auto start = std::chrono::steady_clock::now();
  const auto lines = split_lines(source);
  const auto logical = tokenize(source);
  auto findings = run_rules(logical, lines);
  std::sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
    return std::tie(a.line_start, a.rule_id, a.line_end) < std::tie(b.line_start, b.rule_id, b.line_end);
  });
  findings.erase(std::unique(findings.begin(), findings.end(),
                             [](const Finding& a, const Finding& b) {
                               return a.line_start == b.line_start && a.rule_id == b.rule_id;
                             }),
                 findings.end());
  result.analysis_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.findings = std::move(findings);
  return result;
}

AnalysisResult analyze(std::string_view source, const AnalyzerOptions& options) {
  if (options.external) {
    if (!is_valid_utf8(source)) throw UnreadableSource("source is not valid UTF-8");
    return run_external_analyzer(*options.external, source);
  }
  return analyze(source);
}

std::vector<RuleDescriptor> list_rules() { return rule_registry(); }

}  // namespace sgforge::analysis
