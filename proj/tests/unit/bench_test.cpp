#include <doctest.h>

#include <set>

#include "sgforge/bench/corpus.hpp"
#include "sgforge/bench/resources.hpp"
#include "sgforge/bench/tables.hpp"
#include "support.hpp"

using namespace sgforge;
using namespace sgforge::bench;

namespace {

RunRecord record(std::size_t findings, std::set<int> cwes, std::int64_t corpus_tokens = 100, double total = 1.0) {
  RunRecord r;
  r.entry_id = "e" + std::to_string(findings);
  r.initial_finding_count = findings;
  r.initial_cwes = std::move(cwes);
  r.corpus_prompt_tokens = corpus_tokens;
  r.timings.total_seconds = total;
  r.prompt_tokens = 50;
  r.output_tokens = 20;
  r.time_per_code_line = total / 10.0;
  return r;
}

std::vector<std::string> keys(const MetricsTable& t) {
  std::vector<std::string> out;
  for (const auto& row : t.rows) out.push_back(row.key);
  return out;
}

pipeline::PipelinePrefs fast_scripted() {
  pipeline::PipelinePrefs prefs;
  prefs.backend.kind = llm::BackendKind::Scripted;
  prefs.backend.latency_override_ms = 0;
  return prefs;
}

}  // namespace

TEST_SUITE("bench") {
  TEST_CASE("vulnerability-count grouping") {
    const std::vector<RunRecord> recs{record(2, {78}, 100, 1.0), record(2, {89}, 100, 3.0)};
    const auto t = group_runs(recs, Grouping::VulnCount);
    REQUIRE(keys(t) == std::vector<std::string>{"2"});
    CHECK(t.rows[0].runs == 2);
    CHECK(t.rows[0].total_seconds == doctest::Approx(2.0));
    CHECK(group_runs(std::vector<RunRecord>{}, Grouping::VulnCount).rows.empty());

    const std::vector<RunRecord> mixed{record(10, {78}), record(2, {78}), record(1, {78})};
    CHECK(keys(group_runs(mixed, Grouping::VulnCount)) == std::vector<std::string>{"1", "2", "10"});
  }

  TEST_CASE("CWE grouping") {
    CHECK(keys(group_runs(std::vector<RunRecord>{record(1, {78})}, Grouping::CweId)) == std::vector<std::string>{"78"});
    const std::vector<RunRecord> recs{record(2, {78, 89}), record(0, {})};
    const auto t = group_runs(recs, Grouping::CweId);
    CHECK(keys(t) == std::vector<std::string>{"78", "89"});
    for (const auto& row : t.rows) CHECK(row.runs == 1);
  }

  TEST_CASE("prompt-length grouping") {
    CHECK(length_class(300) == "LOW");
    CHECK(length_class(335.4) == "LOW");
    CHECK(length_class(335.5) == "HIGH");
    CHECK(length_class(500) == "HIGH");
    const std::vector<RunRecord> recs{record(1, {78}, 400), record(1, {78}, 20)};
    CHECK(keys(group_runs(recs, Grouping::PromptLength)) == std::vector<std::string>{"LOW", "HIGH"});
  }

  TEST_CASE("headers and rendering") {
    const std::array<std::string, 8> tail{"gGAN time",   "Security Analysis time", "LLM time",
                                          "Communication time", "Total time", "#Prompt Tokens",
                                          "#Output Tokens", "Time per Code line"};
    for (auto g : {Grouping::VulnCount, Grouping::CweId, Grouping::PromptLength}) {
      const auto h = table_headers(g);
      for (std::size_t i = 0; i < tail.size(); ++i) CHECK(h[i + 1] == tail[i]);
    }
    CHECK(table_headers(Grouping::VulnCount)[0] == "#Vulnerabilities");
    CHECK(table_headers(Grouping::CweId)[0] == "CWE ID");
    CHECK(table_headers(Grouping::PromptLength)[0] == "Prompt Length");

    const std::vector<RunRecord> recs{record(2, {78})};
    const auto t = group_runs(recs, Grouping::VulnCount);
    const auto csv = render_csv(t);
    CHECK(csv.rfind("#Vulnerabilities,gGAN time,Security Analysis time,", 0) == 0);
    CHECK(csv.find("\n2,") != std::string::npos);
    const auto text = render_text(t);
    for (const auto& h : table_headers(Grouping::VulnCount)) CHECK(text.find(h) != std::string::npos);
    CHECK_THROWS_AS(parse_grouping("size"), std::invalid_argument);
    CHECK(parse_grouping("cwe") == Grouping::CweId);
  }

  TEST_CASE("corpus parsing") {
    const auto c = Corpus::from_json(nlohmann::json::parse(
        R"([{"id":"a","instruction":"write a tool","expected_cwes":[78]},{"id":"b","seed_code":"x = 1\n","prompt_tokens":9}])"));
    REQUIRE(c.entries.size() == 2);
    CHECK(c.entries[0].prompt_tokens > 0);
    CHECK(c.entries[1].prompt_tokens == 9);
    CHECK(c.entries[1].request().kind == pipeline::RequestKind::UploadedCode);
    CHECK_THROWS_AS(Corpus::from_json(nlohmann::json::parse(R"([{"id":"a","instruction":"x"},{"id":"a","instruction":"y"}])")),
                    std::invalid_argument);
    CHECK_THROWS_AS(Corpus::from_json(nlohmann::json::parse(R"([{"id":"a"}])")), std::invalid_argument);
    CHECK_THROWS_AS(Corpus::from_json(nlohmann::json::parse(R"([{"id":"a","instruction":"x","seed_code":"y"}])")),
                    std::invalid_argument);
  }

  TEST_CASE("default corpus under the scripted backend") {
    const auto corpus = Corpus::load(test::data_path("default_corpus.json"));
    REQUIRE(corpus.entries.size() >= 20);
    const auto run = run_corpus(corpus, fast_scripted(), 4);
    CHECK(run.failures.empty());
    REQUIRE(run.records.size() == corpus.entries.size());
    const std::set<int> six{20, 78, 89, 259, 327, 703};
    bool low = false, high = false;
    for (std::size_t i = 0; i < run.records.size(); ++i) {
      const auto& r = run.records[i];
      CHECK(r.entry_id == corpus.entries[i].id);
      CHECK(r.initial_finding_count >= 1);
      for (int cwe : r.initial_cwes) CHECK(six.count(cwe) == 1);
      const std::set<int> expected(corpus.entries[i].expected_cwes.begin(), corpus.entries[i].expected_cwes.end());
      CHECK(r.initial_cwes == expected);
      (length_class(static_cast<double>(r.corpus_prompt_tokens)) == "LOW" ? low : high) = true;
    }
    CHECK(low);
    CHECK(high);
    for (auto g : {Grouping::VulnCount, Grouping::CweId, Grouping::PromptLength}) {
      CHECK_FALSE(group_runs(run.records, g).rows.empty());
    }
  }

  TEST_CASE("resource sampling") {
    const auto snap = read_process_snapshot();
    CHECK(snap.rss_mb > 0.0);
    CHECK(snap.cpu_seconds >= 0.0);
    const auto usage = measure_resources("spin", [] {
      const auto end = std::chrono::steady_clock::now() + std::chrono::milliseconds(350);
      volatile double x = 0;
      while (std::chrono::steady_clock::now() < end) x = x + 1.0;
    }, std::chrono::milliseconds(50));
    CHECK(usage.samples >= 2);
    CHECK(usage.cpu_fraction_mean > 0.2);
    CHECK(usage.memory_mb_peak > 0.0);

    Corpus tiny = Corpus::load(test::data_path("default_corpus.json"));
    tiny.entries.resize(3);
    const auto cmp = sample_resources(tiny, fast_scripted());
    const auto text = render_resources_text(cmp);
    CHECK(text.find("PromSec") != std::string::npos);
    CHECK(text.find("No PromSec") != std::string::npos);
    CHECK(render_resources_csv(cmp).find("CPU (Percentage)") != std::string::npos);
    CHECK(render_resources_csv(cmp).find("Memory (MB)") != std::string::npos);
  }
}
