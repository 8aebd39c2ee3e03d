#include <doctest.h>

#include <set>

#include "sgforge/analysis/analyzer.hpp"
#include "sgforge/analysis/python_lexer.hpp"
#include "sgforge/error.hpp"
#include "support.hpp"

using namespace sgforge;
using analysis::analyze;

namespace {

std::vector<int> cwes(std::string_view src) {
  std::vector<int> out;
  for (const auto& f : analyze(src).findings) out.push_back(f.cwe_id);
  return out;
}

std::size_t line_count(std::string_view src) { return analysis::split_lines(src).size(); }

// One flagged line per family, used for concatenation and immunity checks.
const std::vector<std::pair<int, std::string>> kSamples = {
    {20, "config = yaml.load(stream)\n"},
    {20, "value = eval(user_input)\n"},
    {78, "os.system(cmd)\n"},
    {78, "subprocess.call(cmd, shell=True)\n"},
    {89, "cursor.execute(\"SELECT * FROM t WHERE id = \" + uid)\n"},
    {259, "password = \"admin123\"\n"},
    {327, "h = hashlib.md5(data)\n"},
    {327, "c = DES.new(key, DES.MODE_ECB)\n"},
    {703, "try:\n    f()\nexcept:\n    pass\n"},
};

}  // namespace

TEST_SUITE("analyzer") {
  TEST_CASE("documented examples") {
    auto r = analyze("password = \"admin123\"");
    REQUIRE(r.findings.size() == 1);
    CHECK(r.findings[0].cwe_id == 259);
    CHECK(r.findings[0].line_start == 1);

    CHECK(analyze("").findings.empty());

    r = analyze("import os\nos.system(user_cmd)");
    REQUIRE(r.findings.size() == 1);
    CHECK(r.findings[0].cwe_id == 78);
    CHECK(r.findings[0].line_start == 2);

    CHECK(cwes("h = hashlib.md5(data)") == std::vector<int>{327});
    CHECK(cwes("try:\n  f()\nexcept:\n  pass") == std::vector<int>{703});
  }

  TEST_CASE("CWE-20 variants") {
    CHECK(cwes("yaml.load(s, Loader=yaml.FullLoader)") == std::vector<int>{20});
    CHECK(cwes("yaml.unsafe_load(s)") == std::vector<int>{20});
    CHECK(cwes("yaml.load(s, Loader=yaml.SafeLoader)").empty());
    CHECK(cwes("yaml.safe_load(s)").empty());
    CHECK(cwes("exec(code)") == std::vector<int>{20});
    CHECK(cwes("eval('1 + 2')").empty());
    CHECK(cwes("ast.literal_eval(text)").empty());
    CHECK(cwes("model.eval()").empty());
  }

  TEST_CASE("CWE-78 variants") {
    CHECK(cwes("os.popen('ls ' + d)") == std::vector<int>{78});
    CHECK(cwes("subprocess.run(cmd, shell=True)") == std::vector<int>{78});
    CHECK(cwes("subprocess.run(['ls', d])").empty());
    CHECK(cwes("subprocess.run(cmd, shell=False)").empty());
    CHECK(cwes("import os as o\no.system(c)") == std::vector<int>{78});
    CHECK(cwes("from os import system\nsystem(c)") == std::vector<int>{78});
  }

  TEST_CASE("CWE-89 variants") {
    CHECK(cwes("cur.execute(\"SELECT a FROM t WHERE b = '%s'\" % b)") == std::vector<int>{89});
    CHECK(cwes("cur.execute(\"DELETE FROM t WHERE id = {}\".format(i))") == std::vector<int>{89});
    CHECK(cwes("cur.execute(f\"UPDATE t SET a = {a}\")") == std::vector<int>{89});
    CHECK(cwes("q = \"SELECT * FROM t WHERE n = '\" + n + \"'\"\ncur.execute(q)") == std::vector<int>{89});
    CHECK(cwes("cur.execute(\"SELECT a FROM t WHERE b = ?\", (b,))").empty());
    CHECK(cwes("cur.execute(\"SELECT a FROM t\")").empty());
  }

  TEST_CASE("CWE-259 variants") {
    CHECK(cwes("def connect(user, pwd=\"letmein\"):\n    return user") == std::vector<int>{259});
    CHECK(cwes("client = Client(secret=\"abc\")") == std::vector<int>{259});
    CHECK(cwes("if password == \"root\":\n    ok()") == std::vector<int>{259});
    CHECK(cwes("password = os.environ[\"PW\"]").empty());
    CHECK(cwes("username = \"admin\"").empty());
  }

  TEST_CASE("CWE-327 variants") {
    CHECK(cwes("hashlib.sha1(b)") == std::vector<int>{327});
    CHECK(cwes("hashlib.new('md5', b)") == std::vector<int>{327});
    CHECK(cwes("ARC4.new(key)") == std::vector<int>{327});
    CHECK(cwes("hashlib.md5(b, usedforsecurity=False)").empty());
    CHECK(cwes("hashlib.sha256(b)").empty());
  }

  TEST_CASE("CWE-703 variants") {
    CHECK(cwes("for x in xs:\n    try:\n        f(x)\n    except Exception:\n        continue") == std::vector<int>{703});
    CHECK(cwes("try:\n    f()\nexcept ValueError:\n    pass") == std::vector<int>{703});
    CHECK(cwes("try:\n    f()\nexcept ValueError as e:\n    log(e)").empty());
    CHECK(cwes("try:\n    f()\nfinally:\n    close()").empty());
  }

  TEST_CASE("string and comment immunity") {
    for (const auto& [cwe, sample] : kSamples) {
      CAPTURE(sample);
      std::string commented;
      for (const auto line : analysis::split_lines(sample)) commented += "# " + std::string(line) + "\n";
      CHECK(analyze(commented).findings.empty());

      nlohmann::json quoted = sample;
      CHECK(analyze("text = " + quoted.dump() + "\n").findings.empty());
      CHECK(analyze("doc = '''\n" + sample + "'''\n").findings.empty());
    }
  }

  TEST_CASE("monotone concatenation") {
    for (const auto& [cwe_a, a] : kSamples) {
      for (const auto& [cwe_b, b] : kSamples) {
        CAPTURE(a);
        CAPTURE(b);
        const auto fa = analyze(a).findings;
        const auto fb = analyze(b).findings;
        const auto fab = analyze(a + b).findings;
        const int offset = static_cast<int>(line_count(a));
        for (const auto& f : fa) {
          CHECK(std::find(fab.begin(), fab.end(), f) != fab.end());
        }
        for (auto f : fb) {
          f.line_start += offset;
          f.line_end += offset;
          CHECK(std::find(fab.begin(), fab.end(), f) != fab.end());
        }
      }
    }
  }

  TEST_CASE("findings are ordered, in bounds and quote the source") {
    std::string all;
    for (const auto& [cwe, s] : kSamples) all += s;
    const auto result = analyze(all);
    CHECK(result.findings.size() == kSamples.size());
    const auto lines = analysis::split_lines(all);
    for (std::size_t i = 0; i < result.findings.size(); ++i) {
      const auto& f = result.findings[i];
      CHECK(f.line_start >= 1);
      CHECK(f.line_start <= f.line_end);
      CHECK(f.line_end <= static_cast<int>(lines.size()));
      std::string joined;
      for (int l = f.line_start; l <= f.line_end; ++l) {
        if (l > f.line_start) joined += "\n";
        joined += lines[static_cast<std::size_t>(l - 1)];
      }
      CHECK(f.snippet == joined);
      CHECK(all.find(f.snippet) != std::string::npos);
      if (i) {
        const auto& p = result.findings[i - 1];
        CHECK(std::tie(p.line_start, p.rule_id) <= std::tie(f.line_start, f.rule_id));
      }
    }
  }

  TEST_CASE("several rules on one line all report") {
    const auto r = analyze("os.system(\"x\" + hashlib.md5(data).hexdigest())");
    std::set<int> seen;
    for (const auto& f : r.findings) seen.insert(f.cwe_id);
    CHECK(seen == std::set<int>{78, 327});
  }

  TEST_CASE("determinism and metadata") {
    const auto a = analyze(test::kThreeFindings);
    const auto b = analyze(test::kThreeFindings);
    CHECK(a.findings == b.findings);
    CHECK(a.source_fingerprint == b.source_fingerprint);
    CHECK(a.source_fingerprint.size() == 64);
    CHECK(a.analyzer_name == analysis::kBuiltinAnalyzerName);
    CHECK(a.analysis_seconds >= 0.0);
  }

  TEST_CASE("invalid UTF-8 is rejected") {
    CHECK_THROWS_AS(analyze(std::string("x = '\xff\xfe'\n")), UnreadableSource);
    CHECK_NOTHROW(analyze("name = 'caf\xc3\xa9'\n"));
  }

  TEST_CASE("malformed Python never throws") {
    for (const char* src : {"def (:\n", "x = '''unterminated", "((((", "except", "\\\n", "f\"{\"", ")))]]"}) {
      CAPTURE(src);
      CHECK_NOTHROW(analyze(src));
    }
  }

  TEST_CASE("rule registry") {
    const auto rules = analysis::list_rules();
    const std::set<int> allowed{20, 78, 89, 259, 327, 703};
    std::set<std::string> ids;
    std::set<int> families;
    for (const auto& r : rules) {
      CHECK(allowed.count(r.cwe_id) == 1);
      CHECK(ids.insert(r.rule_id).second);
      families.insert(r.cwe_id);
    }
    CHECK(families == allowed);
    CHECK(families.count(89) == 1);
    const auto again = analysis::list_rules();
    REQUIRE(again.size() == rules.size());
    for (std::size_t i = 0; i < rules.size(); ++i) CHECK(again[i].rule_id == rules[i].rule_id);
  }

  TEST_CASE("agreement with frozen Bandit labels") {
    const auto doc = test::read_json(test::data_path("oracle_corpus.json"));
    int agree = 0, total = 0;
    std::map<int, int> per_family;
    for (const auto& s : doc["snippets"]) {
      const bool flagged = !analyze(s["source"].get<std::string>()).findings.empty();
      ++total;
      ++per_family[s["family_cwe"].get<int>()];
      if (flagged == s["bandit_flagged"].get<bool>()) ++agree;
    }
    CHECK(total == 24);
    for (const auto& [cwe, n] : per_family) CHECK(n == 4);
    CHECK(agree >= 22);
  }
}
