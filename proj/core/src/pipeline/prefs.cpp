#include "sgforge/pipeline/prefs.hpp"

#include <cstdlib>
#include <filesystem>

#include "sgforge/analysis/json.hpp"

namespace sgforge::pipeline {
namespace {

using nlohmann::json;

const json* field(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return nullptr;
  return &*it;
}

std::string string_field(const json& doc, const char* key) {
  const json* v = field(doc, key);
  if (!v->is_string()) throw InvalidPrefs(std::string("'") + key + "' must be a string");
  return v->get<std::string>();
}

double positive_number(const json& v, const char* key) {
  if (!v.is_number() || !(v.get<double>() > 0.0)) {
    throw InvalidPrefs(std::string("'") + key + "' must be a positive number");
  }
  return v.get<double>();
}

std::shared_ptr<const llm::Scenario> load_scenario(const json& doc, const PrefsContext& ctx) {
  try {
    if (const json* inline_scenario = field(doc, "scenario")) {
      return std::make_shared<const llm::Scenario>(llm::Scenario::from_json(*inline_scenario));
    }
    if (field(doc, "scenario_file")) {
      if (!ctx.trusted) throw InvalidPrefs("scenario_file is not accepted from this client");
      std::filesystem::path path = string_field(doc, "scenario_file");
      if (path.is_relative() && !ctx.base_dir.empty()) path = std::filesystem::path(ctx.base_dir) / path;
      return std::make_shared<const llm::Scenario>(llm::Scenario::load(path.string()));
    }
  } catch (const InvalidBackendConfig& e) {
    throw InvalidPrefs(e.what());
  } catch (const json::exception& e) {
    throw InvalidPrefs(std::string("invalid scenario: ") + e.what());
  }
  return nullptr;  // may be supplied later, e.g. per corpus entry
}

}  // namespace

llm::BackendConfig parse_backend(const json& doc, const PrefsContext& ctx) {
  if (!doc.is_object()) throw InvalidPrefs("'backend' must be an object");
  llm::BackendConfig config;
  const std::string kind = field(doc, "kind") ? string_field(doc, "kind") : "REMOTE";

  if (kind == "SCRIPTED") {
    if (!ctx.allow_scripted) throw InvalidPrefs("SCRIPTED backends are disabled");
    config.kind = llm::BackendKind::Scripted;
    config.scenario = load_scenario(doc, ctx);
    if (const json* v = field(doc, "latency_ms")) {
      if (!v->is_number_integer() || v->get<long long>() < 0) throw InvalidPrefs("'latency_ms' must be >= 0");
      config.latency_override_ms = v->get<int>();
    }
    return config;
  }
  if (kind != "REMOTE") throw InvalidPrefs("unknown backend kind '" + kind + "'");

  // The default credentials only travel to the default endpoint.
  config = ctx.default_backend;
  config.kind = llm::BackendKind::Remote;
  config.scenario.reset();
  config.latency_override_ms.reset();
  if (field(doc, "base_url")) {
    const std::string url = string_field(doc, "base_url");
    if (url != ctx.default_backend.base_url) config.api_key.clear();
    config.base_url = url;
  }
  if (field(doc, "model")) config.model = string_field(doc, "model");
  if (field(doc, "api_key")) config.api_key = string_field(doc, "api_key");
  if (field(doc, "api_key_env")) {
    if (!ctx.trusted) throw InvalidPrefs("api_key_env is not accepted from this client");
    const char* value = std::getenv(string_field(doc, "api_key_env").c_str());
    config.api_key = value ? value : "";
  }
  if (const json* v = field(doc, "timeout_seconds")) config.timeout_seconds = positive_number(*v, "timeout_seconds");
  return config;
}

analysis::AnalyzerOptions resolve_analyzer(const json& doc, const PrefsContext& ctx) {
  analysis::AnalyzerOptions options;
  if (doc.is_null()) return options;
  if (doc.is_string()) {
    const auto name = doc.get<std::string>();
    if (name == "builtin") return options;
    const auto it = ctx.named_analyzers.find(name);
    if (it == ctx.named_analyzers.end()) throw InvalidPrefs("unknown analyzer '" + name + "'");
    options.name = name;
    options.external = it->second;
    return options;
  }
  if (!doc.is_object()) throw InvalidPrefs("'analyzer' must be a name or a tool spec");
  if (!ctx.trusted) throw InvalidPrefs("inline analyzer commands are not accepted from this client");
  try {
    options.external = doc.get<analysis::ExternalToolSpec>();
  } catch (const json::exception& e) {
    throw InvalidPrefs(std::string("invalid analyzer spec: ") + e.what());
  }
  options.name = options.external->name;
  return options;
}

PipelinePrefs parse_prefs(const json& doc, const PrefsContext& ctx) {
  PipelinePrefs prefs;
  prefs.backend = ctx.default_backend;
  if (doc.is_null()) return prefs;
  if (!doc.is_object()) throw InvalidPrefs("prefs must be a JSON object");

  if (field(doc, "mode")) prefs.mode = parse_mode(string_field(doc, "mode"));
  if (const json* v = field(doc, "analyzer")) prefs.analyzer = resolve_analyzer(*v, ctx);
  if (field(doc, "optimizer")) prefs.optimizer_key = string_field(doc, "optimizer");
  if (const json* v = field(doc, "max_iterations")) {
    if (!v->is_number_integer() || v->get<long long>() < 1 || v->get<long long>() > 100) {
      throw InvalidPrefs("'max_iterations' must be an integer in [1, 100]");
    }
    prefs.max_iterations = v->get<int>();
  }
  if (const json* v = field(doc, "backend")) prefs.backend = parse_backend(*v, ctx);
  return prefs;
}

json prefs_to_json(const PipelinePrefs& prefs) {
  json backend = {{"kind", std::string(llm::to_string(prefs.backend.kind))}};
  if (prefs.backend.kind == llm::BackendKind::Remote) {
    backend["base_url"] = prefs.backend.base_url;
    backend["model"] = prefs.backend.model;
    backend["timeout_seconds"] = prefs.backend.timeout_seconds;
  } else {
    backend["scenario_entries"] = prefs.backend.scenario ? prefs.backend.scenario->entries.size() : 0;
    if (prefs.backend.latency_override_ms) backend["latency_ms"] = *prefs.backend.latency_override_ms;
  }
  return json{{"mode", std::string(to_string(prefs.mode))},
              {"analyzer", prefs.analyzer.name},
              {"optimizer", prefs.optimizer_key},
              {"max_iterations", prefs.max_iterations},
              {"backend", backend}};
}

}  // namespace sgforge::pipeline
