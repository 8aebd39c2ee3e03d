#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgforge/analysis/finding.hpp"
#include "sgforge/optimizer/deviation.hpp"
#include "sgforge/pipeline/pipeline.hpp"
#include "sgforge/pipeline/timings.hpp"
#include "sgforge/report/diff.hpp"

namespace sgforge::report {

// Issue accounting between two finding lists, matched as rule_id multisets.
// `introduced` counts findings of rules that grew; it keeps
// remaining == identified - fixed + introduced exact.
struct Summary {
  int identified = 0;
  int fixed = 0;
  int remaining = 0;
  int introduced = 0;

  friend bool operator==(const Summary&, const Summary&) = default;
};

Summary summarize(std::span<const analysis::Finding> original, std::span<const analysis::Finding> final_findings);

struct UsageTotals {
  std::int64_t prompt_tokens = 0;
  std::int64_t output_tokens = 0;
  int llm_calls = 0;

  friend bool operator==(const UsageTotals&, const UsageTotals&) = default;
};

struct SecurityReport {
  std::string report_id;
  std::string created_at;  // ISO-8601 UTC, e.g. 2026-01-31T12:00:00Z
  std::string original_code;
  std::string secured_code;
  std::vector<analysis::Finding> original_findings;
  std::vector<analysis::Finding> secured_findings;
  std::map<std::string, int> confidence_counts;  // LOW/MEDIUM/HIGH over original findings
  Summary summary;
  LineDiff diff;
  pipeline::StageTimings timings;
  UsageTotals usage;
  optimizer::DeviationVerdict deviation;

  friend bool operator==(const SecurityReport&, const SecurityReport&) = default;
};

std::string utc_timestamp_now();

// Report from a completed run. Deterministic given `result` and `created_at`.
SecurityReport build_report(const pipeline::PipelineResult& result, std::string created_at = utc_timestamp_now());

// Everything except report_id and created_at.
nlohmann::json report_body_json(const SecurityReport& report);
nlohmann::json report_to_json(const SecurityReport& report);
SecurityReport report_from_json(const nlohmann::json& doc);

// Sorted keys, no insignificant whitespace, UTF-8.
std::string canonical_dump(const nlohmann::json& doc);
std::string canonical_json(const SecurityReport& report);

// First 16 hex chars of SHA-256 over the canonical body.
std::string compute_report_id(const SecurityReport& report);

bool is_report_id(std::string_view text);

void to_json(nlohmann::json& j, const Summary& s);
void from_json(const nlohmann::json& j, Summary& s);

}  // namespace sgforge::report
