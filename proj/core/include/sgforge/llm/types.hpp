#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace sgforge::llm {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);

struct ChatMessage {
  Role role = Role::User;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_output_tokens = 2048;

  // At least one message, the last one from the user, sane sampling knobs.
  // Throws std::invalid_argument.
  void validate() const;

  const std::string& last_user_message() const;

  friend bool operator==(const ChatRequest&, const ChatRequest&) = default;
};

enum class UsageSource { ApiReported, Estimated };

std::string_view to_string(UsageSource source);

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t output_tokens = 0;
  UsageSource source = UsageSource::Estimated;

  friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
};

struct ChatResponse {
  std::string content;
  TokenUsage usage;
  double llm_seconds = 0.0;
  double communication_seconds = 0.0;
};

// One scripted reply. Entries are consumed in order; when `match` is set the
// last user message must contain it.
struct ScenarioEntry {
  std::optional<std::string> match;
  std::string response_text;
  std::optional<std::int64_t> prompt_tokens;
  std::optional<std::int64_t> output_tokens;
  int latency_ms = 0;
};

struct Scenario {
  std::vector<ScenarioEntry> entries;

  // Accepts either a bare array of entries or {"entries": [...]}.
  static Scenario from_json(const nlohmann::json& j);
  static Scenario load(const std::string& path);
};

enum class BackendKind { Remote, Scripted };

std::string_view to_string(BackendKind kind);

struct BackendConfig {
  BackendKind kind = BackendKind::Remote;
  std::string base_url;
  std::string api_key;  // never logged or persisted
  std::string model;
  double timeout_seconds = 300.0;
  std::shared_ptr<const Scenario> scenario;  // SCRIPTED only
  std::optional<int> latency_override_ms;    // SCRIPTED only; replaces per-entry latency

  // Throws InvalidBackendConfig.
  void validate() const;
};

void to_json(nlohmann::json& j, const ChatMessage& m);
void to_json(nlohmann::json& j, const ChatRequest& r);
void to_json(nlohmann::json& j, const TokenUsage& u);
void from_json(const nlohmann::json& j, TokenUsage& u);

}  // namespace sgforge::llm
