#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgforge/analysis/external_tool.hpp"
#include "sgforge/analysis/finding.hpp"

namespace sgforge::analysis {

inline constexpr std::string_view kBuiltinAnalyzerName = "sgforge-rules";

// Selects the engine for one analysis. Without `external` the built-in rule
// engine runs.
struct AnalyzerOptions {
  std::string name = "builtin";
  std::optional<ExternalToolSpec> external;
};

// Built-in engine. Throws UnreadableSource on invalid UTF-8.
AnalysisResult analyze(std::string_view source);

// Dispatches to the built-in engine or the configured external tool.
AnalysisResult analyze(std::string_view source, const AnalyzerOptions& options);

std::vector<RuleDescriptor> list_rules();

}  // namespace sgforge::analysis
