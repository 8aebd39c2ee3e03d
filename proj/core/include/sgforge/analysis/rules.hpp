#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "sgforge/analysis/finding.hpp"
#include "sgforge/analysis/python_lexer.hpp"

namespace sgforge::analysis {

// Built-in rule registry, in stable order. Severity/confidence defaults
// follow the Bandit test that reports the same weakness.
const std::vector<RuleDescriptor>& rule_registry();

const RuleDescriptor& rule(std::string_view rule_id);

// Runs every built-in rule over the tokenized source. `lines` are the
// physical source lines used to fill finding snippets. Output is unsorted.
std::vector<Finding> run_rules(std::span<const LogicalLine> logical,
                               std::span<const std::string_view> lines);

}  // namespace sgforge::analysis
