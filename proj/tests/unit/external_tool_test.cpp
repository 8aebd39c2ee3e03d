#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "sgforge/analysis/analyzer.hpp"
#include "sgforge/analysis/external_tool.hpp"
#include "sgforge/error.hpp"
#include "support.hpp"

using namespace sgforge;

namespace {

bool on_path(const std::string& exe) {
  const char* path = std::getenv("PATH");
  if (!path) return false;
  std::stringstream dirs(path);
  for (std::string dir; std::getline(dirs, dir, ':');) {
    if (!dir.empty() && ::access((std::filesystem::path(dir) / exe).c_str(), X_OK) == 0) return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("external_tool") {
  TEST_CASE("bandit JSON normalization") {
    const std::string source = "import os\nos.system(cmd)\nx = 1\n";
    const std::string report = R"(Working... {"errors": [], "results": [
      {"test_id": "B605", "issue_severity": "HIGH", "issue_confidence": "HIGH",
       "issue_cwe": {"id": 78, "link": "x"}, "line_number": 2, "issue_text": "shell"},
      {"test_id": "B999", "issue_severity": "WEIRD", "issue_confidence": "LOW",
       "issue_cwe": {"id": 999}, "line_number": 40, "issue_text": "odd"}]})";
    const auto findings = analysis::parse_bandit_json(report, source);
    REQUIRE(findings.size() == 2);
    CHECK(findings[0].rule_id == "B605");
    CHECK(findings[0].cwe_id == 78);
    CHECK(findings[0].severity == analysis::Level::High);
    CHECK(findings[0].snippet == "os.system(cmd)");
    // Unknown CWE ids survive; out-of-range lines are clamped to the text.
    CHECK(findings[1].cwe_id == 999);
    CHECK(findings[1].line_start == 3);
    CHECK(findings[1].severity == analysis::Level::Low);
  }

  TEST_CASE("bad tool output") {
    CHECK_THROWS_AS(analysis::parse_bandit_json("nothing here", "x"), UnparseableToolOutput);
    CHECK_THROWS_AS(analysis::parse_bandit_json("{\"results\": 3}", "x"), UnparseableToolOutput);
    CHECK_THROWS_AS(analysis::parse_bandit_json("{broken", "x"), UnparseableToolOutput);

    analysis::ExternalToolSpec echo{"echo", "echo not-json {file}", "bandit-json", 5.0};
    CHECK_THROWS_AS(analysis::run_external_analyzer(echo, "x = 1\n"), UnparseableToolOutput);
  }

  TEST_CASE("nonexistent executable") {
    analysis::ExternalToolSpec missing{"ghost", "/nonexistent/sgforge-no-such-tool {file}", "bandit-json", 5.0};
    CHECK_THROWS_AS(analysis::run_external_analyzer(missing, "x = 1\n"), AnalyzerUnavailable);

    analysis::ExternalToolSpec no_placeholder{"t", "bandit -f json", "bandit-json", 5.0};
    CHECK_THROWS_AS(analysis::run_external_analyzer(no_placeholder, "x = 1\n"), AnalyzerUnavailable);

    analysis::ExternalToolSpec bad_format{"t", "bandit {file}", "sarif", 5.0};
    CHECK_THROWS_AS(analysis::run_external_analyzer(bad_format, "x = 1\n"), AnalyzerUnavailable);
  }

  TEST_CASE("slow tools are killed at the timeout") {
    test::TempDir dir;
    const auto script = dir / "slow.sh";
    test::write_text(script, "#!/bin/sh\nsleep 5\n");
    std::filesystem::permissions(script, std::filesystem::perms::owner_all);
    analysis::ExternalToolSpec slow{"slow", script.string() + " {file}", "bandit-json", 0.3};
    const auto start = std::chrono::steady_clock::now();
    CHECK_THROWS_AS(analysis::run_external_analyzer(slow, "x = 1\n"), AnalyzerUnavailable);
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(3));
  }

  TEST_CASE("arguments are not interpreted by a shell") {
    test::TempDir dir;
    const auto marker = dir / "pwned";
    // With a shell this would create the marker file.
    analysis::ExternalToolSpec sneaky{"t", "echo {file};touch$IFS" + marker.string(), "bandit-json", 5.0};
    CHECK_THROWS(analysis::run_external_analyzer(sneaky, "x = 1\n"));
    CHECK_FALSE(std::filesystem::exists(marker));
  }

  TEST_CASE("live bandit") {
    if (!on_path("bandit")) {
      MESSAGE("bandit is not installed; skipping live checks");
      return;
    }
    const auto tool = analysis::bandit_tool_spec();
    const auto hit = analysis::run_external_analyzer(tool, "import os\nos.system(user_cmd)\n");
    bool has78 = false;
    for (const auto& f : hit.findings) has78 = has78 || f.cwe_id == 78;
    CHECK(has78);
    CHECK(hit.analyzer_name == "bandit");

    CHECK(analysis::run_external_analyzer(tool, "").findings.empty());

    analysis::AnalyzerOptions options{"bandit", tool};
    CHECK_FALSE(analysis::analyze("import hashlib\nhashlib.md5(b'x')\n", options).findings.empty());
  }
}
