#include "sgforge/optimizer/deviation.hpp"

#include <stdexcept>
#include <vector>

#include "sgforge/analysis/python_lexer.hpp"

namespace sgforge::optimizer {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Preserved: return "PRESERVED";
    case Verdict::Partial: return "PARTIAL";
    case Verdict::Deviated: return "DEVIATED";
  }
  return "PRESERVED";
}

Verdict parse_verdict(std::string_view text) {
  if (text == "PRESERVED") return Verdict::Preserved;
  if (text == "PARTIAL") return Verdict::Partial;
  if (text == "DEVIATED") return Verdict::Deviated;
  throw std::invalid_argument("unknown verdict: " + std::string(text));
}

std::set<Signature> extract_signatures(std::string_view source) {
  std::set<Signature> out;
  struct Scope {
    int indent;
    std::string name;
  };
  std::vector<Scope> classes;
  for (const auto& ll : analysis::tokenize(source)) {
    const auto& t = ll.tokens;
    while (!classes.empty() && classes.back().indent >= ll.indent) classes.pop_back();
    std::size_t k = (t.size() > 1 && t[0].is_name("async")) ? 1 : 0;
    if (t[k].is_name("class") && k + 1 < t.size()) {
      classes.push_back({ll.indent, t[k + 1].text});
      continue;
    }
    if (!t[k].is_name("def") || k + 2 >= t.size() || !t[k + 2].is_op("(")) continue;

    std::string name = t[k + 1].text;
    if (!classes.empty()) name = classes.back().name + "." + name;
    int arity = 0;
    int depth = 0;
    bool segment_has_param = false;
    for (std::size_t i = k + 3; i < t.size(); ++i) {
      const auto& tok = t[i];
      if (tok.is_op("(") || tok.is_op("[") || tok.is_op("{")) ++depth;
      if (tok.is_op(")") || tok.is_op("]") || tok.is_op("}")) {
        if (depth == 0) break;
        --depth;
      }
      if (depth == 0 && tok.is_op(",")) {
        if (segment_has_param) ++arity;
        segment_has_param = false;
        continue;
      }
      // A segment counts unless it is a bare `*` or `/` marker.
      if (depth == 0 && tok.kind == analysis::TokenKind::Name && !segment_has_param) {
        segment_has_param = true;
      }
    }
    if (segment_has_param) ++arity;
    out.insert({name, arity});
  }
  return out;
}

DeviationVerdict assess_functionality_deviation(std::string_view original, std::string_view secured) {
  const auto before = extract_signatures(original);
  const auto after = extract_signatures(secured);
  DeviationVerdict d;
  for (const auto& sig : before) {
    if (after.contains(sig)) ++d.matched_signatures;
    else ++d.missing_signatures;
  }
  for (const auto& sig : after) {
    if (!before.contains(sig)) ++d.added_signatures;
  }
  if (d.missing_signatures == 0 && d.added_signatures == 0) d.verdict = Verdict::Preserved;
  else if (d.matched_signatures == 0 && !before.empty()) d.verdict = Verdict::Deviated;
  else d.verdict = Verdict::Partial;
  return d;
}

void to_json(nlohmann::json& j, const DeviationVerdict& d) {
  j = nlohmann::json{{"verdict", to_string(d.verdict)},
                     {"matched_signatures", d.matched_signatures},
                     {"missing_signatures", d.missing_signatures},
                     {"added_signatures", d.added_signatures}};
}

void from_json(const nlohmann::json& j, DeviationVerdict& d) {
  d.verdict = parse_verdict(j.at("verdict").get<std::string>());
  j.at("matched_signatures").get_to(d.matched_signatures);
  j.at("missing_signatures").get_to(d.missing_signatures);
  j.at("added_signatures").get_to(d.added_signatures);
}

}  // namespace sgforge::optimizer
