#pragma once

#include <memory>

#include "sgforge/llm/types.hpp"

namespace sgforge::llm {

// A chat-completion endpoint. Instances are not shared between pipeline
// runs; a scripted backend keeps its own scenario cursor.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;

  // Throws BackendTimeout, BackendRejected, MalformedResponse (remote) or
  // ScenarioMismatch (scripted).
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

class ScriptedBackend final : public ChatBackend {
 public:
  ScriptedBackend(std::shared_ptr<const Scenario> scenario, std::optional<int> latency_override_ms);

  ChatResponse complete(const ChatRequest& request) override;

  std::size_t calls() const { return cursor_; }

 private:
  std::shared_ptr<const Scenario> scenario_;
  std::optional<int> latency_override_ms_;
  std::size_t cursor_ = 0;
};

class RemoteBackend final : public ChatBackend {
 public:
  explicit RemoteBackend(BackendConfig config);

  ChatResponse complete(const ChatRequest& request) override;

 private:
  BackendConfig config_;
};

// Validates `config` and builds a fresh backend with its own state.
std::unique_ptr<ChatBackend> make_backend(const BackendConfig& config);

// One-shot completion against a fresh backend.
ChatResponse complete(const ChatRequest& request, const BackendConfig& config);

}  // namespace sgforge::llm
