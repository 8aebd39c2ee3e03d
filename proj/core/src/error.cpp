#include "sgforge/error.hpp"

#include <utility>

namespace sgforge {

Error::Error(std::string code, const std::string& message)
    : std::runtime_error(message), code_(std::move(code)) {}

BackendRejected::BackendRejected(int status, std::string body)
    : Error("BackendRejected",
            "backend rejected the request with HTTP status " + std::to_string(status)),
      status_(status),
      body_(std::move(body)) {}

std::string redact(std::string text, const std::string& secret) {
  if (secret.empty()) return text;
  std::string::size_type pos = 0;
  while ((pos = text.find(secret, pos)) != std::string::npos) {
    text.replace(pos, secret.size(), "***");
    pos += 3;
  }
  return text;
}

}  // namespace sgforge
