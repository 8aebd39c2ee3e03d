#include <chrono>
#include <thread>

#include "sgforge/error.hpp"
#include "sgforge/llm/backend.hpp"
#include "sgforge/llm/text.hpp"

namespace sgforge::llm {

ScriptedBackend::ScriptedBackend(std::shared_ptr<const Scenario> scenario,
                                 std::optional<int> latency_override_ms)
    : scenario_(std::move(scenario)), latency_override_ms_(latency_override_ms) {
  if (!scenario_) throw InvalidBackendConfig("scripted backend requires a scenario");
}

ChatResponse ScriptedBackend::complete(const ChatRequest& request) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  request.validate();
  if (cursor_ >= scenario_->entries.size()) {
    throw ScenarioMismatch("scenario exhausted after " + std::to_string(cursor_) + " calls");
  }
  const ScenarioEntry& entry = scenario_->entries[cursor_];
  const std::string& prompt = request.messages.back().content;
  if (entry.match && prompt.find(*entry.match) == std::string::npos) {
    throw ScenarioMismatch("scenario entry " + std::to_string(cursor_) + " expected the prompt to contain '" +
                           *entry.match + "'");
  }
  ++cursor_;

  const int latency_ms = latency_override_ms_.value_or(entry.latency_ms);
  const auto llm_start = clock::now();
  if (latency_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(latency_ms));
  const double llm_seconds = std::chrono::duration<double>(clock::now() - llm_start).count();

  ChatResponse response;
  response.content = entry.response_text;
  if (entry.prompt_tokens && entry.output_tokens) {
    response.usage = {*entry.prompt_tokens, *entry.output_tokens, UsageSource::ApiReported};
  } else {
    std::string joined;
    for (const auto& m : request.messages) joined += m.content;
    response.usage = {entry.prompt_tokens.value_or(estimate_tokens(joined)),
                      entry.output_tokens.value_or(estimate_tokens(entry.response_text)),
                      UsageSource::Estimated};
  }
  const double wall = std::chrono::duration<double>(clock::now() - start).count();
  response.llm_seconds = llm_seconds;
  response.communication_seconds = std::max(0.0, wall - llm_seconds);
  return response;
}

std::unique_ptr<ChatBackend> make_backend(const BackendConfig& config) {
  config.validate();
  if (config.kind == BackendKind::Scripted) {
    return std::make_unique<ScriptedBackend>(config.scenario, config.latency_override_ms);
  }
  return std::make_unique<RemoteBackend>(config);
}

ChatResponse complete(const ChatRequest& request, const BackendConfig& config) {
  return make_backend(config)->complete(request);
}

}  // namespace sgforge::llm
