#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sgforge/bench/corpus.hpp"
#include "sgforge/pipeline/pipeline.hpp"

namespace sgforge::bench {

enum class Grouping { VulnCount, CweId, PromptLength };

Grouping parse_grouping(std::string_view text);  // "vuln" | "cwe" | "length"; throws std::invalid_argument
std::string_view to_string(Grouping g);

inline constexpr double kPromptLengthThreshold = 335.5;

// LOW below the threshold, HIGH at or above it.
std::string_view length_class(double prompt_tokens, double threshold = kPromptLengthThreshold);

// Outcome of one corpus entry.
struct RunRecord {
  std::string entry_id;
  std::size_t initial_finding_count = 0;
  std::set<int> initial_cwes;
  std::int64_t corpus_prompt_tokens = 0;
  pipeline::StageTimings timings;  // summed over iterations
  std::int64_t prompt_tokens = 0;  // sent to the model
  std::int64_t output_tokens = 0;
  int llm_calls = 0;
  double time_per_code_line = 0.0;
};

struct BenchRun {
  std::vector<RunRecord> records;
  std::vector<std::pair<std::string, std::string>> failures;  // (entry id, reason)
};

RunRecord to_record(const CorpusEntry& entry, const pipeline::PipelineResult& result);

// Runs every entry; `parallel` > 1 spreads entries over that many threads.
// Records keep corpus order.
BenchRun run_corpus(const Corpus& corpus, const pipeline::PipelinePrefs& prefs, int parallel = 1);

// Per-group means.
struct MetricsRow {
  std::string key;
  std::size_t runs = 0;
  double optimizer_seconds = 0.0;
  double analysis_seconds = 0.0;
  double llm_seconds = 0.0;
  double communication_seconds = 0.0;
  double total_seconds = 0.0;
  double prompt_tokens = 0.0;
  double output_tokens = 0.0;
  double time_per_code_line = 0.0;
};

struct MetricsTable {
  Grouping grouping = Grouping::VulnCount;
  std::vector<MetricsRow> rows;
};

// Groups records. A record with several distinct CWEs lands in each of
// their rows under Grouping::CweId; records without findings are skipped
// there. Rows are ordered numerically, or LOW before HIGH.
MetricsTable group_runs(std::span<const RunRecord> records, Grouping grouping,
                        double threshold = kPromptLengthThreshold);

MetricsTable bench_by_vuln_count(const Corpus& corpus, const pipeline::PipelinePrefs& prefs);
MetricsTable bench_by_cwe(const Corpus& corpus, const pipeline::PipelinePrefs& prefs);
MetricsTable bench_by_prompt_length(const Corpus& corpus, const pipeline::PipelinePrefs& prefs,
                                    double threshold = kPromptLengthThreshold);

// The nine column headers; only the first depends on the grouping.
std::array<std::string, 9> table_headers(Grouping grouping);

std::string render_text(const MetricsTable& table);
std::string render_csv(const MetricsTable& table);

}  // namespace sgforge::bench
