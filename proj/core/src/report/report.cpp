#include "sgforge/report/report.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>

#include "sgforge/analysis/json.hpp"
#include "sgforge/digest.hpp"

namespace sgforge::report {

using nlohmann::json;

Summary summarize(std::span<const analysis::Finding> original, std::span<const analysis::Finding> final_findings) {
  std::map<std::string, int> before, after;
  for (const auto& f : original) ++before[f.rule_id];
  for (const auto& f : final_findings) ++after[f.rule_id];

  Summary s;
  s.identified = static_cast<int>(original.size());
  s.remaining = static_cast<int>(final_findings.size());
  for (const auto& [rule, count] : before) {
    const auto it = after.find(rule);
    s.fixed += std::max(0, count - (it == after.end() ? 0 : it->second));
  }
  for (const auto& [rule, count] : after) {
    const auto it = before.find(rule);
    s.introduced += std::max(0, count - (it == before.end() ? 0 : it->second));
  }
  return s;
}

std::string utc_timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  ::gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

SecurityReport build_report(const pipeline::PipelineResult& result, std::string created_at) {
  SecurityReport r;
  r.created_at = std::move(created_at);
  r.original_code = result.original_code;
  r.secured_code = result.final_code;
  r.original_findings = result.original_findings().findings;
  r.secured_findings = result.final_findings().findings;
  r.confidence_counts = {{"LOW", 0}, {"MEDIUM", 0}, {"HIGH", 0}};
  for (const auto& f : r.original_findings) ++r.confidence_counts[std::string(analysis::to_string(f.confidence))];
  r.summary = summarize(r.original_findings, r.secured_findings);
  r.diff = diff_lines(r.original_code, r.secured_code);
  r.timings = result.aggregate_timings;
  r.usage = {result.total_usage.prompt_tokens, result.total_usage.output_tokens, result.llm_calls};
  r.deviation = result.deviation;
  r.report_id = compute_report_id(r);
  return r;
}

json report_body_json(const SecurityReport& r) {
  return json{{"original_code", r.original_code},
              {"secured_code", r.secured_code},
              {"original_findings", r.original_findings},
              {"secured_findings", r.secured_findings},
              {"confidence_counts", r.confidence_counts},
              {"summary", r.summary},
              {"diff", r.diff},
              {"timings", r.timings},
              {"usage", json{{"prompt_tokens", r.usage.prompt_tokens},
                             {"output_tokens", r.usage.output_tokens},
                             {"llm_calls", r.usage.llm_calls}}},
              {"deviation", r.deviation}};
}

json report_to_json(const SecurityReport& r) {
  json doc = report_body_json(r);
  doc["report_id"] = r.report_id;
  doc["created_at"] = r.created_at;
  return doc;
}

SecurityReport report_from_json(const json& doc) {
  SecurityReport r;
  doc.at("report_id").get_to(r.report_id);
  doc.at("created_at").get_to(r.created_at);
  doc.at("original_code").get_to(r.original_code);
  doc.at("secured_code").get_to(r.secured_code);
  doc.at("original_findings").get_to(r.original_findings);
  doc.at("secured_findings").get_to(r.secured_findings);
  doc.at("confidence_counts").get_to(r.confidence_counts);
  doc.at("summary").get_to(r.summary);
  doc.at("diff").get_to(r.diff);
  doc.at("timings").get_to(r.timings);
  const auto& usage = doc.at("usage");
  usage.at("prompt_tokens").get_to(r.usage.prompt_tokens);
  usage.at("output_tokens").get_to(r.usage.output_tokens);
  usage.at("llm_calls").get_to(r.usage.llm_calls);
  doc.at("deviation").get_to(r.deviation);
  return r;
}

std::string canonical_dump(const json& doc) {
  // nlohmann's default object type is an ordered std::map, so keys come out sorted.
  return doc.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string canonical_json(const SecurityReport& report) { return canonical_dump(report_to_json(report)); }

std::string compute_report_id(const SecurityReport& report) {
  return sha256_hex(canonical_dump(report_body_json(report))).substr(0, 16);
}

bool is_report_id(std::string_view text) {
  return text.size() == 16 &&
         std::all_of(text.begin(), text.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

void to_json(json& j, const Summary& s) {
  j = json{{"identified", s.identified}, {"fixed", s.fixed}, {"remaining", s.remaining}, {"introduced", s.introduced}};
}

void from_json(const json& j, Summary& s) {
  j.at("identified").get_to(s.identified);
  j.at("fixed").get_to(s.fixed);
  j.at("remaining").get_to(s.remaining);
  j.at("introduced").get_to(s.introduced);
}

}  // namespace sgforge::report
