#pragma once

#include <stdexcept>
#include <string>

namespace sgforge {

// Base for every failure the library reports. `code()` is a stable
// identifier (e.g. "BackendRejected") used in API error envelopes.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message);

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define SGFORGE_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  }

// security-analyzer
SGFORGE_DEFINE_ERROR(UnreadableSource);
SGFORGE_DEFINE_ERROR(AnalyzerUnavailable);
SGFORGE_DEFINE_ERROR(UnparseableToolOutput);

// llm-gateway
SGFORGE_DEFINE_ERROR(BackendTimeout);
SGFORGE_DEFINE_ERROR(MalformedResponse);
SGFORGE_DEFINE_ERROR(InvalidBackendConfig);
SGFORGE_DEFINE_ERROR(ScenarioMismatch);

class BackendRejected : public Error {
 public:
  BackendRejected(int status, std::string body);

  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

 private:
  int status_;
  std::string body_;
};

// prompt-optimizer
SGFORGE_DEFINE_ERROR(GraphTooLarge);
SGFORGE_DEFINE_ERROR(UnknownCwe);
SGFORGE_DEFINE_ERROR(UnknownOptimizer);

// pipeline
SGFORGE_DEFINE_ERROR(InvalidPrefs);
SGFORGE_DEFINE_ERROR(InvalidRequest);

// report-store
SGFORGE_DEFINE_ERROR(ReportNotFound);
SGFORGE_DEFINE_ERROR(StoreUnavailable);
SGFORGE_DEFINE_ERROR(ReportCorrupted);

#undef SGFORGE_DEFINE_ERROR

// Replaces every occurrence of `secret` in `text` with "***". Empty secrets
// leave the text untouched.
std::string redact(std::string text, const std::string& secret);

}  // namespace sgforge
