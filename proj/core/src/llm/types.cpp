#include "sgforge/llm/types.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "sgforge/error.hpp"

namespace sgforge::llm {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

std::string_view to_string(UsageSource source) {
  return source == UsageSource::ApiReported ? "API_REPORTED" : "ESTIMATED";
}

std::string_view to_string(BackendKind kind) {
  return kind == BackendKind::Remote ? "REMOTE" : "SCRIPTED";
}

void ChatRequest::validate() const {
  if (messages.empty()) throw std::invalid_argument("chat request has no messages");
  if (messages.back().role != Role::User) {
    throw std::invalid_argument("last chat message must come from the user");
  }
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw std::invalid_argument("temperature must be a finite value >= 0");
  }
  if (max_output_tokens <= 0) throw std::invalid_argument("max_output_tokens must be positive");
}

const std::string& ChatRequest::last_user_message() const {
  validate();
  return messages.back().content;
}

void BackendConfig::validate() const {
  if (!(timeout_seconds > 0.0)) throw InvalidBackendConfig("timeout_seconds must be positive");
  if (kind == BackendKind::Remote) {
    if (base_url.empty()) throw InvalidBackendConfig("REMOTE backend requires a base_url");
    if (!base_url.starts_with("http://") && !base_url.starts_with("https://")) {
      throw InvalidBackendConfig("base_url must start with http:// or https://");
    }
  } else {
    if (!scenario) throw InvalidBackendConfig("SCRIPTED backend requires a scenario");
    if (latency_override_ms && *latency_override_ms < 0) {
      throw InvalidBackendConfig("latency override must be >= 0");
    }
  }
}

Scenario Scenario::from_json(const nlohmann::json& j) {
  const nlohmann::json* list = &j;
  if (j.is_object()) {
    if (!j.contains("entries")) throw InvalidBackendConfig("scenario object lacks 'entries'");
    list = &j.at("entries");
  }
  if (!list->is_array()) throw InvalidBackendConfig("scenario entries must be an array");
  Scenario s;
  for (const auto& e : *list) {
    if (!e.is_object() || !e.contains("response_text") || !e["response_text"].is_string()) {
      throw InvalidBackendConfig("scenario entry requires a string response_text");
    }
    ScenarioEntry entry;
    entry.response_text = e["response_text"].get<std::string>();
    if (e.contains("match") && !e["match"].is_null()) entry.match = e["match"].get<std::string>();
    if (e.contains("prompt_tokens") && !e["prompt_tokens"].is_null()) {
      entry.prompt_tokens = e["prompt_tokens"].get<std::int64_t>();
    }
    if (e.contains("output_tokens") && !e["output_tokens"].is_null()) {
      entry.output_tokens = e["output_tokens"].get<std::int64_t>();
    }
    entry.latency_ms = e.value("latency_ms", 0);
    if (entry.latency_ms < 0) throw InvalidBackendConfig("latency_ms must be >= 0");
    s.entries.push_back(std::move(entry));
  }
  return s;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidBackendConfig("cannot open scenario file: " + path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidBackendConfig("invalid scenario file " + path + ": " + e.what());
  }
}

void to_json(nlohmann::json& j, const ChatMessage& m) {
  j = nlohmann::json{{"role", to_string(m.role)}, {"content", m.content}};
}

void to_json(nlohmann::json& j, const ChatRequest& r) {
  j = nlohmann::json{{"messages", r.messages},
                     {"temperature", r.temperature},
                     {"max_tokens", r.max_output_tokens}};
}

void to_json(nlohmann::json& j, const TokenUsage& u) {
  j = nlohmann::json{{"prompt_tokens", u.prompt_tokens},
                     {"output_tokens", u.output_tokens},
                     {"source", to_string(u.source)}};
}

void from_json(const nlohmann::json& j, TokenUsage& u) {
  j.at("prompt_tokens").get_to(u.prompt_tokens);
  j.at("output_tokens").get_to(u.output_tokens);
  u.source = j.value("source", std::string("ESTIMATED")) == "API_REPORTED" ? UsageSource::ApiReported
                                                                           : UsageSource::Estimated;
}

}  // namespace sgforge::llm
