#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sgforge::analysis {

enum class Level { Low, Medium, High };

std::string_view to_string(Level level);
Level parse_level(std::string_view text);  // throws std::invalid_argument

struct Finding {
  std::string rule_id;
  int cwe_id = 0;
  Level severity = Level::Low;
  Level confidence = Level::Low;
  int line_start = 1;
  int line_end = 1;
  std::string message;
  std::string snippet;  // source lines line_start..line_end, verbatim

  friend bool operator==(const Finding&, const Finding&) = default;
};

struct AnalysisResult {
  std::vector<Finding> findings;  // sorted by (line_start, rule_id)
  double analysis_seconds = 0.0;
  std::string analyzer_name;
  std::string source_fingerprint;  // sha256 hex of the analyzed text
};

struct RuleDescriptor {
  std::string rule_id;
  int cwe_id = 0;
  std::string title;
  Level default_severity = Level::Low;
  Level default_confidence = Level::Low;
  std::string description;

  friend bool operator==(const RuleDescriptor&, const RuleDescriptor&) = default;
};

}  // namespace sgforge::analysis
