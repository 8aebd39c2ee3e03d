#pragma once

#include <set>
#include <string>
#include <string_view>
#include <utility>

#include <nlohmann/json.hpp>

namespace sgforge::optimizer {

enum class Verdict { Preserved, Partial, Deviated };

std::string_view to_string(Verdict v);
Verdict parse_verdict(std::string_view text);

struct DeviationVerdict {
  Verdict verdict = Verdict::Preserved;
  int matched_signatures = 0;
  int missing_signatures = 0;
  int added_signatures = 0;

  friend bool operator==(const DeviationVerdict&, const DeviationVerdict&) = default;
};

// (qualified function name, parameter count). Methods are qualified with
// their enclosing class.
using Signature = std::pair<std::string, int>;

std::set<Signature> extract_signatures(std::string_view source);

DeviationVerdict assess_functionality_deviation(std::string_view original, std::string_view secured);

void to_json(nlohmann::json& j, const DeviationVerdict& d);
void from_json(const nlohmann::json& j, DeviationVerdict& d);

}  // namespace sgforge::optimizer
