#include "sgforge/bench/tables.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include "sgforge/error.hpp"

namespace sgforge::bench {
namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::array<std::string, 9> row_cells(const MetricsRow& r) {
  return {r.key,
          fixed(r.optimizer_seconds, 4),
          fixed(r.analysis_seconds, 3),
          fixed(r.llm_seconds, 2),
          fixed(r.communication_seconds, 2),
          fixed(r.total_seconds, 2),
          fixed(r.prompt_tokens, 0),
          fixed(r.output_tokens, 0),
          fixed(r.time_per_code_line, 3)};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Grouping parse_grouping(std::string_view text) {
  if (text == "vuln") return Grouping::VulnCount;
  if (text == "cwe") return Grouping::CweId;
  if (text == "length") return Grouping::PromptLength;
  throw std::invalid_argument("unknown grouping '" + std::string(text) + "' (expected vuln, cwe or length)");
}

std::string_view to_string(Grouping g) {
  switch (g) {
    case Grouping::VulnCount: return "vuln";
    case Grouping::CweId: return "cwe";
    case Grouping::PromptLength: return "length";
  }
  return "vuln";
}

std::string_view length_class(double prompt_tokens, double threshold) {
  return prompt_tokens < threshold ? "LOW" : "HIGH";
}

RunRecord to_record(const CorpusEntry& entry, const pipeline::PipelineResult& result) {
  RunRecord r;
  r.entry_id = entry.id;
  const auto& initial = result.original_findings().findings;
  r.initial_finding_count = initial.size();
  for (const auto& f : initial) r.initial_cwes.insert(f.cwe_id);
  r.corpus_prompt_tokens = entry.prompt_tokens;
  r.timings = result.aggregate_timings;
  r.prompt_tokens = result.total_usage.prompt_tokens;
  r.output_tokens = result.total_usage.output_tokens;
  r.llm_calls = result.llm_calls;
  r.time_per_code_line =
      r.timings.total_seconds / static_cast<double>(pipeline::non_empty_line_count(result.final_code));
  return r;
}

BenchRun run_corpus(const Corpus& corpus, const pipeline::PipelinePrefs& prefs, int parallel) {
  const std::size_t n = corpus.entries.size();
  std::vector<std::optional<RunRecord>> slots(n);
  std::vector<std::string> errors(n);

  auto run_one = [&](std::size_t i) {
    const auto& entry = corpus.entries[i];
    try {
      slots[i] = to_record(entry, pipeline::run(entry.request(), entry.prefs_for(prefs)));
    } catch (const std::exception& e) {
      errors[i] = redact(e.what(), prefs.backend.api_key);
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(parallel, 1)), 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) run_one(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  BenchRun out;
  for (std::size_t i = 0; i < n; ++i) {
    if (slots[i]) {
      out.records.push_back(std::move(*slots[i]));
    } else {
      out.failures.emplace_back(corpus.entries[i].id, errors[i]);
    }
  }
  return out;
}

MetricsTable group_runs(std::span<const RunRecord> records, Grouping grouping, double threshold) {
  // Sort key: numeric for counts and CWE ids, 0/1 for LOW/HIGH.
  std::map<long long, std::pair<std::string, std::vector<const RunRecord*>>> groups;
  auto add = [&](long long order, std::string key, const RunRecord& r) {
    auto& g = groups[order];
    g.first = std::move(key);
    g.second.push_back(&r);
  };
  for (const auto& r : records) {
    switch (grouping) {
      case Grouping::VulnCount:
        add(static_cast<long long>(r.initial_finding_count), std::to_string(r.initial_finding_count), r);
        break;
      case Grouping::CweId:
        for (int cwe : r.initial_cwes) add(cwe, std::to_string(cwe), r);
        break;
      case Grouping::PromptLength: {
        const auto cls = length_class(static_cast<double>(r.corpus_prompt_tokens), threshold);
        add(cls == "LOW" ? 0 : 1, std::string(cls), r);
        break;
      }
    }
  }

  MetricsTable table;
  table.grouping = grouping;
  for (const auto& [order, group] : groups) {
    MetricsRow row;
    row.key = group.first;
    row.runs = group.second.size();
    for (const RunRecord* r : group.second) {
      row.optimizer_seconds += r->timings.optimizer_seconds;
      row.analysis_seconds += r->timings.analysis_seconds;
      row.llm_seconds += r->timings.llm_seconds;
      row.communication_seconds += r->timings.communication_seconds;
      row.total_seconds += r->timings.total_seconds;
      row.prompt_tokens += static_cast<double>(r->prompt_tokens);
      row.output_tokens += static_cast<double>(r->output_tokens);
      row.time_per_code_line += r->time_per_code_line;
    }
    const double k = static_cast<double>(row.runs);
    for (double* v : {&row.optimizer_seconds, &row.analysis_seconds, &row.llm_seconds, &row.communication_seconds,
                      &row.total_seconds, &row.prompt_tokens, &row.output_tokens, &row.time_per_code_line}) {
      *v /= k;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

MetricsTable bench_by_vuln_count(const Corpus& corpus, const pipeline::PipelinePrefs& prefs) {
  return group_runs(run_corpus(corpus, prefs).records, Grouping::VulnCount);
}

MetricsTable bench_by_cwe(const Corpus& corpus, const pipeline::PipelinePrefs& prefs) {
  return group_runs(run_corpus(corpus, prefs).records, Grouping::CweId);
}

MetricsTable bench_by_prompt_length(const Corpus& corpus, const pipeline::PipelinePrefs& prefs, double threshold) {
  return group_runs(run_corpus(corpus, prefs).records, Grouping::PromptLength, threshold);
}

std::array<std::string, 9> table_headers(Grouping grouping) {
  std::string key;
  switch (grouping) {
    case Grouping::VulnCount: key = "#Vulnerabilities"; break;
    case Grouping::CweId: key = "CWE ID"; break;
    case Grouping::PromptLength: key = "Prompt Length"; break;
  }
  // "gGAN time" is the established label for the prompt-optimizer stage.
  return {key,          "gGAN time",      "Security Analysis time", "LLM time",           "Communication time",
          "Total time", "#Prompt Tokens", "#Output Tokens",         "Time per Code line"};
}

std::string render_text(const MetricsTable& table) {
  const auto headers = table_headers(table.grouping);
  std::vector<std::array<std::string, 9>> cells;
  for (const auto& row : table.rows) cells.push_back(row_cells(row));

  std::array<std::size_t, 9> width{};
  for (std::size_t c = 0; c < 9; ++c) {
    width[c] = headers[c].size();
    for (const auto& r : cells) width[c] = std::max(width[c], r[c].size());
  }
  auto line = [&](const std::array<std::string, 9>& v) {
    std::string out;
    for (std::size_t c = 0; c < 9; ++c) {
      if (c) out += "  ";
      // Key column left-aligned, numbers right-aligned.
      const std::string pad(width[c] - v[c].size(), ' ');
      out += c == 0 ? v[c] + pad : pad + v[c];
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::string out = line(headers);
  std::size_t rule = 0;
  for (auto w : width) rule += w;
  out += std::string(rule + 2 * 8, '-') + "\n";
  for (const auto& r : cells) out += line(r);
  return out;
}

std::string render_csv(const MetricsTable& table) {
  std::string out;
  auto line = [&](const std::array<std::string, 9>& v) {
    for (std::size_t c = 0; c < 9; ++c) {
      if (c) out += ',';
      out += csv_field(v[c]);
    }
    out += '\n';
  };
  line(table_headers(table.grouping));
  for (const auto& row : table.rows) line(row_cells(row));
  return out;
}

}  // namespace sgforge::bench
