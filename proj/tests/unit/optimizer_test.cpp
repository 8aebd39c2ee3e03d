#include <doctest.h>

#include <string>

#include "sgforge/analysis/analyzer.hpp"
#include "sgforge/error.hpp"
#include "sgforge/optimizer/code_graph.hpp"
#include "sgforge/optimizer/deviation.hpp"
#include "sgforge/optimizer/directives.hpp"
#include "sgforge/optimizer/prompt.hpp"
#include "sgforge/optimizer/registry.hpp"
#include "support.hpp"

using namespace sgforge;
using namespace sgforge::optimizer;

namespace {

analysis::Finding finding(int cwe, int line) {
  analysis::Finding f;
  f.rule_id = "SG-" + std::to_string(cwe);
  f.cwe_id = cwe;
  f.line_start = f.line_end = line;
  return f;
}

std::size_t count_edges(const CodeGraph& g, EdgeKind kind) {
  return static_cast<std::size_t>(
      std::count_if(g.edges.begin(), g.edges.end(), [&](const GraphEdge& e) { return e.kind == kind; }));
}

}  // namespace

TEST_SUITE("optimizer") {
  TEST_CASE("code graph examples") {
    const auto empty = build_code_graph("");
    CHECK(empty.nodes.empty());
    CHECK(empty.edges.empty());

    const auto fn = build_code_graph("def f():\n  x = 1");
    REQUIRE(fn.nodes.size() == 2);
    CHECK(fn.nodes[0].kind == NodeKind::Function);
    CHECK(fn.nodes[0].label == "f");
    CHECK(fn.nodes[1].kind == NodeKind::Assignment);
    CHECK(fn.nodes[1].label == "x");
    REQUIRE(fn.edges.size() == 1);
    CHECK(fn.edges[0].kind == EdgeKind::Contains);

    const auto seq = build_code_graph("a = 1\nb = 2");
    CHECK(seq.nodes.size() == 2);
    REQUIRE(seq.edges.size() == 1);
    CHECK(seq.edges[0].kind == EdgeKind::Sequence);
  }

  TEST_CASE("code graph invariants") {
    const auto g = build_code_graph(test::kThreeFindings);
    std::set<int> ids;
    for (const auto& n : g.nodes) CHECK(ids.insert(n.id).second);
    for (const auto& e : g.edges) {
      CHECK(ids.count(e.from) == 1);
      CHECK(ids.count(e.to) == 1);
    }
    CHECK(g.function_labels() == std::vector<std::string>{"backup"});
    CHECK(count_edges(g, EdgeKind::Contains) == 3);
    CHECK(g == build_code_graph(test::kThreeFindings));
  }

  TEST_CASE("node cap") {
    std::string big;
    for (int i = 0; i < 600; ++i) big += "x" + std::to_string(i) + " = " + std::to_string(i) + "\n";
    CHECK_THROWS_AS(build_code_graph(big), GraphTooLarge);
    CHECK(build_code_graph(big, 1000).nodes.size() == 600);
  }

  TEST_CASE("fix directives") {
    CHECK(derive_fix_directives({}).empty());

    const std::vector<analysis::Finding> one{finding(259, 3)};
    const auto d = derive_fix_directives(one);
    REQUIRE(d.size() == 1);
    CHECK(d[0].anchor_line == 3);
    CHECK(d[0].instruction.find("line 3") != std::string::npos);
    CHECK(d[0].instruction.find("environment") != std::string::npos);
    CHECK(d[0].instruction.find("secrets") != std::string::npos);

    const std::vector<analysis::Finding> dup{finding(78, 2), finding(78, 2)};
    CHECK(derive_fix_directives(dup).size() == 1);

    const std::vector<analysis::Finding> unordered{finding(89, 9), finding(20, 1), finding(327, 9)};
    const auto ordered = derive_fix_directives(unordered);
    REQUIRE(ordered.size() == 3);
    CHECK(ordered[0].anchor_line == 1);
    CHECK(ordered[1].cwe_id == 89);
    CHECK(ordered[2].cwe_id == 327);
  }

  TEST_CASE("unknown CWE policy") {
    const std::vector<analysis::Finding> odd{finding(1333, 4)};
    const auto generic = derive_fix_directives(odd);
    REQUIRE(generic.size() == 1);
    CHECK(generic[0].instruction.find("line 4") != std::string::npos);
    CHECK(generic[0].instruction.find("CWE-1333") != std::string::npos);
    CHECK_THROWS_AS(derive_fix_directives(odd, UnknownCwePolicy::Reject), UnknownCwe);
    for (int cwe : {20, 78, 89, 259, 327, 703}) CHECK(has_directive_template(cwe));
    CHECK_FALSE(has_directive_template(1333));
  }

  TEST_CASE("prompt synthesis") {
    const std::string code = "def login(user, pw):\n    password = \"x\"\n    return user\n";
    const std::vector<analysis::Finding> fs{finding(259, 2)};
    const auto directives = derive_fix_directives(fs);
    const auto req = synthesize_prompt("write a login script", code, directives, build_code_graph(code));
    REQUIRE(req.messages.size() == 2);
    CHECK(req.messages[0].role == llm::Role::System);
    CHECK(req.messages[0].content == code_only_system_prompt());
    const std::string& user = req.last_user_message();

    const auto p_instr = user.find("write a login script");
    const auto p_code = user.find(code);
    const auto p_keep = user.find("`login`");
    const auto p_dir = user.find(directives[0].instruction);
    REQUIRE(p_instr != std::string::npos);
    REQUIRE(p_code != std::string::npos);
    REQUIRE(p_keep != std::string::npos);
    REQUIRE(p_dir != std::string::npos);
    CHECK(p_instr < p_code);
    CHECK(p_code < p_keep);
    CHECK(p_keep < p_dir);

    CHECK_THROWS_AS(synthesize_prompt("x", code, {}, std::nullopt), std::invalid_argument);
    CHECK(req == synthesize_prompt("write a login script", code, directives, build_code_graph(code)));
  }

  TEST_CASE("every finding's CWE appears in the prompt") {
    const auto findings = analysis::analyze(test::kThreeFindings).findings;
    const auto req = RuleGraphOptimizer().optimize("back up", test::kThreeFindings, findings);
    for (const auto& f : findings) {
      CHECK(req.last_user_message().find(std::to_string(f.cwe_id)) != std::string::npos);
    }
  }

  TEST_CASE("oversized graphs degrade to directives only") {
    std::string big = "password = \"x\"\n";
    for (int i = 0; i < 20; ++i) big += "v" + std::to_string(i) + " = 1\n";
    const auto findings = analysis::analyze(big).findings;
    const auto req = RuleGraphOptimizer(4).optimize("t", big, findings);
    CHECK(req.last_user_message().find("Preserve") == std::string::npos);
    CHECK(req.last_user_message().find("CWE-259") != std::string::npos);
  }

  TEST_CASE("deviation verdicts") {
    const std::string x = "def f(a, b):\n    return a\n\nclass K:\n    def m(self):\n        pass\n";
    auto v = assess_functionality_deviation(x, x);
    CHECK(v.verdict == Verdict::Preserved);
    CHECK(v.matched_signatures == 2);

    v = assess_functionality_deviation("def f(a): ...", "def g(a): ...");
    CHECK(v == DeviationVerdict{Verdict::Deviated, 0, 1, 1});

    v = assess_functionality_deviation("def f(a):\ndef h():", "def f(a):\ndef k():");
    CHECK(v == DeviationVerdict{Verdict::Partial, 1, 1, 1});

    // Arity changes count as a different signature.
    CHECK(assess_functionality_deviation("def f(a): ...", "def f(a, b): ...").verdict == Verdict::Deviated);
    CHECK(assess_functionality_deviation("x = 1", "x = 2").verdict == Verdict::Preserved);
    CHECK(assess_functionality_deviation("x = 1", "def f(): ...").verdict == Verdict::Partial);

    const auto a = "def f(a): ...", b = "def f(a): ...\ndef g(): ...";
    CHECK((assess_functionality_deviation(a, b).verdict == Verdict::Preserved) ==
          (assess_functionality_deviation(b, a).verdict == Verdict::Preserved));
  }

  TEST_CASE("signature extraction") {
    const auto sigs = extract_signatures(
        "def f(a, b=1, *args, **kw):\n    pass\nclass C:\n    def m(self, *, k):\n        pass\n"
        "async def g(x, /, y):\n    pass\n");
    CHECK(sigs.count({"f", 4}) == 1);
    CHECK(sigs.count({"C.m", 2}) == 1);
    CHECK(sigs.count({"g", 2}) == 1);
  }

  TEST_CASE("registry swaps optimizers") {
    struct Dummy final : PromptOptimizer {
      llm::ChatRequest optimize(std::string_view, std::string_view, std::span<const analysis::Finding>) const override {
        llm::ChatRequest r;
        r.messages.push_back({llm::Role::User, "dummy"});
        return r;
      }
    };
    OptimizerRegistry registry;
    registry.add("dummy", std::make_shared<Dummy>());
    CHECK(registry.contains("dummy"));
    CHECK(registry.get("dummy")->optimize("", "", {}).last_user_message() == "dummy");
    CHECK_THROWS_AS(registry.get("nope"), UnknownOptimizer);
    CHECK(OptimizerRegistry::global().contains(kDefaultOptimizerKey));
  }
}
