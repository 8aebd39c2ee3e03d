#pragma once

#include <string>
#include <string_view>

#include "sgforge/analysis/finding.hpp"

namespace sgforge::analysis {

inline constexpr std::string_view kBanditJsonFormat = "bandit-json";

// How to invoke an external analyzer. `command` is split on whitespace; the
// `{file}` placeholder is replaced by the path of a temporary copy of the
// source. No shell is involved.
struct ExternalToolSpec {
  std::string name = "external";
  std::string command;
  std::string output_format = std::string(kBanditJsonFormat);
  double timeout_seconds = 30.0;
};

ExternalToolSpec bandit_tool_spec();

// Throws AnalyzerUnavailable when the tool cannot be spawned or times out,
// UnparseableToolOutput when its output does not match `output_format`.
AnalysisResult run_external_analyzer(const ExternalToolSpec& tool, std::string_view source);

// Normalizes a Bandit JSON report for `source` into findings. Unknown CWE ids
// are kept as reported.
std::vector<Finding> parse_bandit_json(std::string_view json_text, std::string_view source);

}  // namespace sgforge::analysis
