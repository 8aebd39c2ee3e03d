#include "sgforge/api/config.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "sgforge/analysis/json.hpp"

namespace sgforge::api {
namespace {

const char* env(const char* name) {
  const char* v = std::getenv(name);
  return v && *v ? v : nullptr;
}

}  // namespace

std::pair<std::string, int> parse_listen_address(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw std::invalid_argument("listen address must look like HOST:PORT");
  }
  const std::string port_text(text.substr(colon + 1));
  int port = -1;
  try {
    std::size_t used = 0;
    port = std::stoi(port_text, &used);
    if (used != port_text.size()) port = -1;
  } catch (const std::exception&) {
    port = -1;
  }
  if (port < 0 || port > 65535) throw std::invalid_argument("invalid port in listen address");
  std::string host(text.substr(0, colon));
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  return {host, port};
}

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig c;
  if (const char* v = env("SGFORGE_BACKEND_URL")) c.default_backend.base_url = v;
  if (const char* v = env("SGFORGE_API_KEY")) c.default_backend.api_key = v;
  if (const char* v = env("SGFORGE_MODEL")) c.default_backend.model = v;
  if (const char* v = env("SGFORGE_STORE_DIR")) c.store_dir = v;
  if (const char* v = env("SGFORGE_LISTEN")) std::tie(c.listen_host, c.listen_port) = parse_listen_address(v);
  return c;
}

void ServiceConfig::apply(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("service config must be a JSON object");
  try {
    if (doc.contains("listen")) std::tie(listen_host, listen_port) = parse_listen_address(doc["listen"].get<std::string>());
    if (doc.contains("store_dir")) doc["store_dir"].get_to(store_dir);
    if (doc.contains("allow_scripted")) doc["allow_scripted"].get_to(allow_scripted);
    if (doc.contains("worker_threads")) doc["worker_threads"].get_to(worker_threads);
    if (doc.contains("backend")) {
      const auto& b = doc["backend"];
      if (b.contains("base_url")) b["base_url"].get_to(default_backend.base_url);
      if (b.contains("api_key")) b["api_key"].get_to(default_backend.api_key);
      if (b.contains("model")) b["model"].get_to(default_backend.model);
      if (b.contains("timeout_seconds")) b["timeout_seconds"].get_to(default_backend.timeout_seconds);
    }
    if (doc.contains("external_analyzers")) {
      for (const auto& [name, spec] : doc["external_analyzers"].items()) {
        auto tool = spec.get<analysis::ExternalToolSpec>();
        tool.name = name;
        external_analyzers[name] = tool;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("invalid service config: ") + e.what());
  }
  if (worker_threads < 1) throw std::invalid_argument("worker_threads must be >= 1");
}

void ServiceConfig::apply_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config file " + path + " is not valid JSON: " + e.what());
  }
  apply(doc);
}

}  // namespace sgforge::api
