#pragma once

#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "sgforge/analysis/external_tool.hpp"
#include "sgforge/llm/types.hpp"
#include "sgforge/pipeline/pipeline.hpp"

namespace sgforge::pipeline {

// What a prefs document may reference. Documents from untrusted clients
// (the HTTP API) may only name analyzers from `named_analyzers` and may not
// read scenario files from disk.
struct PrefsContext {
  llm::BackendConfig default_backend;
  std::map<std::string, analysis::ExternalToolSpec, std::less<>> named_analyzers;
  bool trusted = false;
  bool allow_scripted = true;
  std::string base_dir;  // resolves relative scenario_file paths (trusted only)
};

// Parses a prefs document:
//   {"mode": "PROMSEC", "analyzer": "builtin" | {tool spec}, "optimizer": "rule-graph",
//    "max_iterations": 5, "backend": {...}}
// Missing fields take defaults; a missing backend uses ctx.default_backend.
// Throws InvalidPrefs.
PipelinePrefs parse_prefs(const nlohmann::json& doc, const PrefsContext& ctx);

llm::BackendConfig parse_backend(const nlohmann::json& doc, const PrefsContext& ctx);

analysis::AnalyzerOptions resolve_analyzer(const nlohmann::json& doc, const PrefsContext& ctx);

nlohmann::json prefs_to_json(const PipelinePrefs& prefs);  // api_key omitted

}  // namespace sgforge::pipeline
