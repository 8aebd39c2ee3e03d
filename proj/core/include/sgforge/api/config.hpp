#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>

#include <nlohmann/json.hpp>

#include "sgforge/analysis/external_tool.hpp"
#include "sgforge/llm/types.hpp"

namespace sgforge::api {

struct ServiceConfig {
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  std::string store_dir = "sgforge-reports";
  llm::BackendConfig default_backend;
  // Analyzers clients may select by name in addition to "builtin".
  std::map<std::string, analysis::ExternalToolSpec, std::less<>> external_analyzers;
  bool allow_scripted = true;
  int worker_threads = 16;

  // Defaults overlaid with SGFORGE_BACKEND_URL, SGFORGE_API_KEY,
  // SGFORGE_MODEL, SGFORGE_STORE_DIR and SGFORGE_LISTEN.
  static ServiceConfig from_env();

  // Overlays a JSON config document; its values win over the environment.
  // Throws std::invalid_argument.
  void apply(const nlohmann::json& doc);
  void apply_file(const std::string& path);
};

// "host:port" -> (host, port). Throws std::invalid_argument.
std::pair<std::string, int> parse_listen_address(std::string_view text);

}  // namespace sgforge::api
