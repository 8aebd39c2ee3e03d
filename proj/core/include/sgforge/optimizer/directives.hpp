#pragma once

#include <span>
#include <string>
#include <vector>

#include "sgforge/analysis/finding.hpp"

namespace sgforge::optimizer {

struct FixDirective {
  int cwe_id = 0;
  std::string instruction;
  int anchor_line = 1;

  friend bool operator==(const FixDirective&, const FixDirective&) = default;
};

enum class UnknownCwePolicy {
  GenericTemplate,  // "fix the reported issue at line N (CWE-X)"
  Reject,           // throw UnknownCwe
};

// One directive per distinct (cwe_id, line_start), ordered by anchor line
// then CWE id.
std::vector<FixDirective> derive_fix_directives(std::span<const analysis::Finding> findings,
                                                UnknownCwePolicy policy = UnknownCwePolicy::GenericTemplate);

// True when a dedicated template exists for `cwe_id`.
bool has_directive_template(int cwe_id);

}  // namespace sgforge::optimizer
