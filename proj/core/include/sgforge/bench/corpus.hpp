#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgforge/llm/types.hpp"
#include "sgforge/pipeline/pipeline.hpp"

namespace sgforge::bench {

// One benchmark case. Exactly one of `instruction` and `seed_code` is set.
struct CorpusEntry {
  std::string id;
  std::optional<std::string> instruction;
  std::optional<std::string> seed_code;
  std::vector<int> expected_cwes;
  std::int64_t prompt_tokens = 0;  // estimated from the text when absent
  std::shared_ptr<const llm::Scenario> scenario;  // replaces a scripted backend's scenario

  pipeline::GenerationRequest request() const;

  // `prefs` with this entry's scenario swapped in when the backend is scripted.
  pipeline::PipelinePrefs prefs_for(const pipeline::PipelinePrefs& prefs) const;
};

// {"entries": [{"id", "instruction" | "seed_code", "expected_cwes",
//               "prompt_tokens"?, "scenario"?}]}
struct Corpus {
  std::vector<CorpusEntry> entries;

  // Throws std::invalid_argument.
  static Corpus from_json(const nlohmann::json& doc);
  static Corpus load(const std::string& path);
};

}  // namespace sgforge::bench
