#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <optional>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "sgforge/error.hpp"
#include "sgforge/llm/backend.hpp"
#include "sgforge/llm/text.hpp"

namespace sgforge::llm {
namespace {

struct ParsedUrl {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path_prefix;  // no trailing slash

  std::string origin() const { return scheme + "://" + host + ":" + std::to_string(port); }
};

ParsedUrl parse_url(const std::string& url) {
  ParsedUrl out;
  const auto sep = url.find("://");
  if (sep == std::string::npos) throw InvalidBackendConfig("base_url lacks a scheme");
  out.scheme = url.substr(0, sep);
  std::string rest = url.substr(sep + 3);
  const auto slash = rest.find('/');
  std::string authority = rest.substr(0, slash);
  out.path_prefix = slash == std::string::npos ? "" : rest.substr(slash);
  while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
  const auto colon = authority.rfind(':');
  if (colon != std::string::npos && authority.find(']') == std::string::npos) {
    out.host = authority.substr(0, colon);
    try {
      out.port = std::stoi(authority.substr(colon + 1));
    } catch (const std::exception&) {
      throw InvalidBackendConfig("base_url has an invalid port");
    }
  } else {
    out.host = authority;
    out.port = out.scheme == "https" ? 443 : 80;
  }
  if (out.host.empty()) throw InvalidBackendConfig("base_url lacks a host");
  return out;
}

// Seconds needed to open a TCP connection to the endpoint, or nullopt when the
// probe fails. Used to split wall time into communication vs. model time.
std::optional<double> probe_connect_seconds(const ParsedUrl& url, double timeout_seconds) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(url.host.c_str(), std::to_string(url.port).c_str(), &hints, &res) != 0) {
    return std::nullopt;
  }
  std::optional<double> result;
  for (addrinfo* ai = res; ai && !result; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_NONBLOCK | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd < 0) continue;
    int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
    if (rc != 0 && errno == EINPROGRESS) {
      pollfd pfd{fd, POLLOUT, 0};
      const int ms = static_cast<int>(std::min(timeout_seconds, 5.0) * 1000);
      if (::poll(&pfd, 1, ms) == 1) {
        int err = 0;
        socklen_t len = sizeof(err);
        ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
        rc = err == 0 ? 0 : -1;
      }
    }
    if (rc == 0) result = std::chrono::duration<double>(clock::now() - start).count();
    ::close(fd);
  }
  ::freeaddrinfo(res);
  return result;
}

}  // namespace

RemoteBackend::RemoteBackend(BackendConfig config) : config_(std::move(config)) {
  config_.validate();
}

ChatResponse RemoteBackend::complete(const ChatRequest& request) {
  using clock = std::chrono::steady_clock;
  request.validate();
  const ParsedUrl url = parse_url(config_.base_url);

  nlohmann::json body = {{"model", config_.model},
                         {"messages", request.messages},
                         {"temperature", request.temperature},
                         {"max_tokens", request.max_output_tokens}};

  const auto start = clock::now();
  const auto connect_seconds = probe_connect_seconds(url, config_.timeout_seconds);

  httplib::Client client(url.origin());
  const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
  const auto secs = static_cast<time_t>(timeout.count());
  const auto usecs = static_cast<time_t>((timeout.count() - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  auto res = client.Post(url.path_prefix + "/chat/completions", headers, body.dump(), "application/json");
  const double wall = std::chrono::duration<double>(clock::now() - start).count();

  if (!res) {
    const auto err = res.error();
    const std::string what = httplib::to_string(err);
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
        err == httplib::Error::Write) {
      throw BackendTimeout("backend did not answer within " + std::to_string(config_.timeout_seconds) +
                           " s (" + what + ")");
    }
    throw BackendRejected(0, "transport error: " + what);
  }
  if (res->status < 200 || res->status >= 300) {
    throw BackendRejected(res->status, redact(res->body, config_.api_key));
  }

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception&) {
    throw MalformedResponse("backend returned a non-JSON body");
  }
  const nlohmann::json* content = nullptr;
  if (doc.is_object() && doc.contains("choices") && doc["choices"].is_array() && !doc["choices"].empty()) {
    const auto& choice = doc["choices"][0];
    if (choice.is_object() && choice.contains("message") && choice["message"].is_object() &&
        choice["message"].contains("content") && choice["message"]["content"].is_string()) {
      content = &choice["message"]["content"];
    }
  }
  if (!content) throw MalformedResponse("response lacks choices[0].message.content");

  ChatResponse response;
  response.content = content->get<std::string>();
  const auto& usage = doc.contains("usage") ? doc["usage"] : nlohmann::json();
  if (usage.is_object() && usage.contains("prompt_tokens") && usage["prompt_tokens"].is_number_integer() &&
      usage.contains("completion_tokens") && usage["completion_tokens"].is_number_integer()) {
    response.usage = {usage["prompt_tokens"].get<std::int64_t>(),
                      usage["completion_tokens"].get<std::int64_t>(), UsageSource::ApiReported};
  } else {
    std::string joined;
    for (const auto& m : request.messages) joined += m.content;
    response.usage = {estimate_tokens(joined), estimate_tokens(response.content), UsageSource::Estimated};
  }

  // Prefer the server's own processing time when it reports one.
  double llm = 0.0;
  if (res->has_header("openai-processing-ms")) {
    try {
      llm = std::stod(res->get_header_value("openai-processing-ms")) / 1000.0;
    } catch (const std::exception&) {
      llm = 0.0;
    }
  } else {
    llm = wall - connect_seconds.value_or(0.0);
  }
  response.llm_seconds = std::clamp(llm, 0.0, wall);
  response.communication_seconds = wall - response.llm_seconds;
  return response;
}

}  // namespace sgforge::llm
