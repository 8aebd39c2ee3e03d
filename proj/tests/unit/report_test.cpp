#include <doctest.h>

#include <random>

#include "sgforge/analysis/analyzer.hpp"
#include "sgforge/pipeline/pipeline.hpp"
#include "sgforge/report/diff.hpp"
#include "sgforge/report/html.hpp"
#include "sgforge/report/report.hpp"
#include "support.hpp"

using namespace sgforge;
using namespace sgforge::report;

namespace {

analysis::Finding finding(const std::string& rule, int cwe, int line = 1) {
  analysis::Finding f;
  f.rule_id = rule;
  f.cwe_id = cwe;
  f.line_start = line;
  f.line_end = line;
  f.severity = analysis::Level::Medium;
  f.confidence = analysis::Level::High;
  return f;
}

// Textbook O(n*m) LCS length, kept separate from the production diff.
std::size_t naive_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
  return t[a.size()][b.size()];
}

std::string random_text(std::mt19937& rng) {
  static const char* vocab[] = {"a = 1", "b = 2", "import os", "", "return x", "print(a)", "x += 1"};
  std::uniform_int_distribution<int> len(0, 12), pick(0, 6), nl(0, 1);
  std::string out;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    out += vocab[pick(rng)];
    if (i + 1 < n || nl(rng)) out += '\n';
  }
  return out;
}

pipeline::PipelineResult loop_result() {
  pipeline::PipelinePrefs prefs;
  prefs.backend = test::scripted({test::kThreeFindings, test::kOneFinding, test::kClean});
  return pipeline::run(pipeline::GenerationRequest::from_instruction("back up data"), prefs);
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("summary accounting") {
    const std::vector<analysis::Finding> a{finding("B105", 259), finding("B605", 78, 2), finding("B605", 78, 3)};
    const std::vector<analysis::Finding> b{finding("B605", 78, 5)};
    CHECK(summarize(a, b) == Summary{3, 2, 1, 0});

    const std::vector<analysis::Finding> c{finding("B608", 89)};
    const std::vector<analysis::Finding> d{finding("B608", 89), finding("B303", 327)};
    CHECK(summarize(c, d) == Summary{1, 0, 2, 1});

    CHECK(summarize({}, {}) == Summary{0, 0, 0, 0});
    const auto s = summarize(a, {});
    CHECK(s.remaining == s.identified - s.fixed + s.introduced);
  }

  TEST_CASE("clean input yields one keep hunk") {
    const auto diff = diff_lines(test::kClean, test::kClean);
    REQUIRE(diff.hunks.size() == 1);
    CHECK(diff.hunks[0].op == DiffOp::Keep);
    CHECK(apply_diff(diff, test::kClean) == test::kClean);
  }

  TEST_CASE("split and join are inverses") {
    CHECK(split_diff_lines("") == std::vector<std::string>{""});
    CHECK(split_diff_lines("a\n") == std::vector<std::string>{"a", ""});
    for (const char* s : {"", "a", "a\n", "\n\n", "a\nb"}) CHECK(join_diff_lines(split_diff_lines(s)) == s);
  }

  TEST_CASE("diff law and minimality on random pairs") {
    std::mt19937 rng(20240611);
    for (int i = 0; i < 200; ++i) {
      const auto a = random_text(rng);
      const auto b = random_text(rng);
      const auto d = diff_lines(a, b);
      CHECK(apply_diff(d, a) == b);
      std::size_t kept = 0;
      for (std::size_t h = 0; h < d.hunks.size(); ++h) {
        if (h > 0) CHECK(d.hunks[h].op != d.hunks[h - 1].op);
        if (d.hunks[h].op == DiffOp::Keep) kept += d.hunks[h].lines.size();
      }
      CHECK(kept == naive_lcs(split_diff_lines(a), split_diff_lines(b)));
      LineDiff round = nlohmann::json(d).get<LineDiff>();
      CHECK(round == d);
    }
  }

  TEST_CASE("apply_diff rejects a mismatched original") {
    const auto d = diff_lines("a\nb\n", "a\nc\n");
    CHECK_THROWS_AS(apply_diff(d, "x\nb\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_diff_op("replace"), std::invalid_argument);
  }

  TEST_CASE("report from a completed run") {
    const auto result = loop_result();
    const auto rep = build_report(result, "2026-01-31T12:00:00Z");
    CHECK(rep.summary == Summary{3, 3, 0, 0});
    CHECK(rep.usage.llm_calls == 3);
    CHECK(rep.secured_findings.empty());
    CHECK(rep.confidence_counts.size() == 3);
    int total = 0;
    for (const auto& [level, n] : rep.confidence_counts) total += n;
    CHECK(total == 3);
    CHECK(apply_diff(rep.diff, rep.original_code) == rep.secured_code);
    CHECK(is_report_id(rep.report_id));
    CHECK(rep.report_id == compute_report_id(rep));

    const auto again = build_report(result, "2027-05-05T00:00:00Z");
    CHECK(again.report_id == rep.report_id);
    CHECK(report_from_json(report_to_json(rep)) == rep);
  }

  TEST_CASE("canonical JSON") {
    const auto doc = nlohmann::json::parse(R"({"b": 1, "a": {"d": [1, 2], "c": "x"}})");
    CHECK(canonical_dump(doc) == R"({"a":{"c":"x","d":[1,2]},"b":1})");
    const auto rep = build_report(loop_result(), "2026-01-31T12:00:00Z");
    const auto text = canonical_json(rep);
    CHECK(text.find('\n') == std::string::npos);
    CHECK(canonical_dump(nlohmann::json::parse(text)) == text);
  }

  TEST_CASE("report ids") {
    CHECK(is_report_id("0123456789abcdef"));
    CHECK_FALSE(is_report_id("0123456789ABCDEF"));
    CHECK_FALSE(is_report_id("0123456789abcde"));
    CHECK_FALSE(is_report_id("../../etc/passwd"));
  }

  TEST_CASE("html page") {
    const auto rep = build_report(loop_result(), "2026-01-31T12:00:00Z");
    const auto html = render_html(rep);
    CHECK(html == render_html(rep));
    CHECK(html.find("id=\"summary\"") != std::string::npos);
    CHECK(html.find("Identified: 3") != std::string::npos);
    CHECK(html.find("Fixed: 3") != std::string::npos);
    CHECK(html.find("Remaining: 0") != std::string::npos);
    CHECK(html.find("Original code (3)") != std::string::npos);
    CHECK(html.find("Secured code (0)") != std::string::npos);
    CHECK(html.find("id=\"confidence-data\"") != std::string::npos);
    CHECK(html.find("hashlib.sha256") != std::string::npos);
    for (const auto& f : rep.original_findings) CHECK(html.find(html_escape(f.rule_id)) != std::string::npos);
    CHECK(html_escape("<a href=\"x\">&'") == "&lt;a href=&quot;x&quot;&gt;&amp;&#39;");
    CHECK(html.find("\"hunter2-admin\"") == std::string::npos);  // quotes are escaped
  }

  TEST_CASE("html for a clean upload") {
    pipeline::PipelinePrefs prefs;
    const auto rep = build_report(pipeline::run(pipeline::GenerationRequest::from_code(test::kClean), prefs));
    const auto html = render_html(rep);
    CHECK(html.find("Identified: 0") != std::string::npos);
    CHECK(html.find("No security issues") != std::string::npos);
  }
}
