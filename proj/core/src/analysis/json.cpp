#include "sgforge/analysis/json.hpp"

namespace sgforge::analysis {

void to_json(nlohmann::json& j, const Finding& f) {
  j = nlohmann::json{{"rule_id", f.rule_id},
                     {"cwe_id", f.cwe_id},
                     {"severity", to_string(f.severity)},
                     {"confidence", to_string(f.confidence)},
                     {"line_start", f.line_start},
                     {"line_end", f.line_end},
                     {"message", f.message},
                     {"snippet", f.snippet}};
}

void from_json(const nlohmann::json& j, Finding& f) {
  j.at("rule_id").get_to(f.rule_id);
  j.at("cwe_id").get_to(f.cwe_id);
  f.severity = parse_level(j.at("severity").get<std::string>());
  f.confidence = parse_level(j.at("confidence").get<std::string>());
  j.at("line_start").get_to(f.line_start);
  j.at("line_end").get_to(f.line_end);
  j.at("message").get_to(f.message);
  j.at("snippet").get_to(f.snippet);
}

void to_json(nlohmann::json& j, const AnalysisResult& r) {
  j = nlohmann::json{{"findings", r.findings},
                     {"analysis_seconds", r.analysis_seconds},
                     {"analyzer_name", r.analyzer_name},
                     {"source_fingerprint", r.source_fingerprint}};
}

void to_json(nlohmann::json& j, const RuleDescriptor& r) {
  j = nlohmann::json{{"rule_id", r.rule_id},
                     {"cwe_id", r.cwe_id},
                     {"title", r.title},
                     {"default_severity", to_string(r.default_severity)},
                     {"default_confidence", to_string(r.default_confidence)},
                     {"description", r.description}};
}

void to_json(nlohmann::json& j, const ExternalToolSpec& t) {
  j = nlohmann::json{{"name", t.name},
                     {"command", t.command},
                     {"output_format", t.output_format},
                     {"timeout_seconds", t.timeout_seconds}};
}

void from_json(const nlohmann::json& j, ExternalToolSpec& t) {
  t.name = j.value("name", std::string("external"));
  j.at("command").get_to(t.command);
  t.output_format = j.value("output_format", std::string(kBanditJsonFormat));
  t.timeout_seconds = j.value("timeout_seconds", 30.0);
}

}  // namespace sgforge::analysis
