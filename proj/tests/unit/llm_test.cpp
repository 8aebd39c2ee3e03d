#include <doctest.h>

#include <chrono>

#include "sgforge/error.hpp"
#include "sgforge/llm/backend.hpp"
#include "sgforge/llm/text.hpp"
#include "support.hpp"

using namespace sgforge;
using namespace sgforge::llm;

namespace {

ChatRequest user_request(const std::string& text) {
  ChatRequest r;
  r.messages.push_back({Role::System, "Reply with code only."});
  r.messages.push_back({Role::User, text});
  return r;
}

std::shared_ptr<const Scenario> scenario(std::vector<ScenarioEntry> entries) {
  return std::make_shared<const Scenario>(Scenario{std::move(entries)});
}

}  // namespace

TEST_SUITE("llm") {
  TEST_CASE("extract_code") {
    CHECK(extract_code("```\nx = 1\n```") == "x = 1");
    CHECK(extract_code("x = 1") == "x = 1");
    CHECK(extract_code("intro text\n```\na\n```\nmid\n```\nb\n```") == "a\nb");
    CHECK(extract_code("```python\nprint('hi')\n```\nThat's it.") == "print('hi')");
    CHECK(extract_code("  \n x = 1 \n\n") == "x = 1");
    CHECK(extract_code("```python\ndef f():\n    return 1\n") == "def f():\n    return 1");
    CHECK(extract_code("") == "");
    const std::string bare = "def f(a):\n    return a";
    CHECK(extract_code(extract_code(bare)) == bare);
  }

  TEST_CASE("estimate_tokens") {
    CHECK(estimate_tokens("") == 0);
    CHECK(estimate_tokens("abcd") == 1);
    CHECK(estimate_tokens("abcde") == 2);
    CHECK(estimate_tokens("\xc3\xa9\xc3\xa9\xc3\xa9\xc3\xa9") == 1);  // four code points
  }

  TEST_CASE("scripted reply with reported usage and latency") {
    ScriptedBackend backend(scenario({{std::nullopt, "print('hi')", 120, 30, 1000}}), std::nullopt);
    const auto start = std::chrono::steady_clock::now();
    const auto r = backend.complete(user_request("anything"));
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(r.content == "print('hi')");
    CHECK(r.usage == TokenUsage{120, 30, UsageSource::ApiReported});
    CHECK(r.llm_seconds == doctest::Approx(1.0).epsilon(0.05));
    CHECK(r.communication_seconds >= 0.0);
    CHECK(r.llm_seconds + r.communication_seconds <= wall + 0.005);
  }

  TEST_CASE("scripted usage falls back to the estimator") {
    const std::string reply = "```python\nx = 1\n```";
    ScriptedBackend backend(scenario({{std::nullopt, reply, std::nullopt, std::nullopt, 0}}), std::nullopt);
    const auto req = user_request("write x");
    const auto r = backend.complete(req);
    CHECK(r.usage.source == UsageSource::Estimated);
    // "Reply with code only." + "write x" is 28 characters.
    CHECK(r.usage.prompt_tokens == 7);
    CHECK(r.usage.output_tokens == estimate_tokens(reply));
  }

  TEST_CASE("scripted replay is deterministic per cursor") {
    auto s = scenario({{std::nullopt, "a", 1, 2, 0}, {std::string("fix"), "b", 3, 4, 0}});
    for (int run = 0; run < 2; ++run) {
      ScriptedBackend backend(s, 0);
      CHECK(backend.complete(user_request("go")).content == "a");
      CHECK(backend.complete(user_request("please fix it")).content == "b");
      CHECK(backend.calls() == 2);
      CHECK_THROWS_AS(backend.complete(user_request("more")), ScenarioMismatch);
    }
  }

  TEST_CASE("scripted match failures are loud") {
    ScriptedBackend backend(scenario({{std::string("needle"), "x", std::nullopt, std::nullopt, 0}}), 0);
    CHECK_THROWS_AS(backend.complete(user_request("haystack")), ScenarioMismatch);
  }

  TEST_CASE("scenario documents") {
    const auto s = Scenario::from_json(nlohmann::json::parse(
        R"({"entries": [{"response_text": "x", "prompt_tokens": 3, "output_tokens": 4, "latency_ms": 5},
                        {"match": "m", "response_text": "y"}]})"));
    REQUIRE(s.entries.size() == 2);
    CHECK(s.entries[0].latency_ms == 5);
    CHECK(*s.entries[1].match == "m");
    CHECK(Scenario::from_json(nlohmann::json::parse(R"([{"response_text": "z"}])")).entries.size() == 1);
    CHECK_THROWS_AS(Scenario::from_json(nlohmann::json::parse(R"([{"text": "z"}])")), InvalidBackendConfig);
    CHECK_THROWS_AS(Scenario::load("/nonexistent/scenario.json"), InvalidBackendConfig);
    CHECK(Scenario::load(test::data_path("scenarios/loop_3_1_0.json")).entries.size() == 3);
  }

  TEST_CASE("backend config validation") {
    BackendConfig remote;
    CHECK_THROWS_AS(remote.validate(), InvalidBackendConfig);
    remote.base_url = "ftp://example.com";
    CHECK_THROWS_AS(remote.validate(), InvalidBackendConfig);
    remote.base_url = "http://127.0.0.1:9/v1";
    CHECK_NOTHROW(remote.validate());
    remote.timeout_seconds = 0;
    CHECK_THROWS_AS(remote.validate(), InvalidBackendConfig);

    BackendConfig scripted;
    scripted.kind = BackendKind::Scripted;
    CHECK_THROWS_AS(scripted.validate(), InvalidBackendConfig);
    CHECK_THROWS_AS(make_backend(scripted), InvalidBackendConfig);
  }

  TEST_CASE("chat request contract") {
    ChatRequest empty;
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
    ChatRequest assistant_last;
    assistant_last.messages.push_back({Role::Assistant, "hi"});
    CHECK_THROWS_AS(assistant_last.validate(), std::invalid_argument);
    auto ok = user_request("x");
    CHECK_NOTHROW(ok.validate());
    ok.temperature = -1;
    CHECK_THROWS_AS(ok.validate(), std::invalid_argument);
  }

  TEST_CASE("redaction") {
    CHECK(redact("key sk-123 and sk-123", "sk-123") == "key *** and ***");
    CHECK(redact("nothing", "") == "nothing");
  }
}
