#include "sgforge/bench/corpus.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "sgforge/error.hpp"
#include "sgforge/llm/text.hpp"

namespace sgforge::bench {

pipeline::GenerationRequest CorpusEntry::request() const {
  return instruction ? pipeline::GenerationRequest::from_instruction(*instruction)
                     : pipeline::GenerationRequest::from_code(seed_code.value_or(""));
}

pipeline::PipelinePrefs CorpusEntry::prefs_for(const pipeline::PipelinePrefs& prefs) const {
  pipeline::PipelinePrefs out = prefs;
  if (scenario && out.backend.kind == llm::BackendKind::Scripted) out.backend.scenario = scenario;
  return out;
}

Corpus Corpus::from_json(const nlohmann::json& doc) {
  const nlohmann::json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("entries")) throw std::invalid_argument("corpus lacks an 'entries' array");
    list = &doc["entries"];
  }
  if (!list->is_array()) throw std::invalid_argument("corpus entries must be an array");

  Corpus corpus;
  std::set<std::string> seen;
  for (const auto& e : *list) {
    CorpusEntry entry;
    try {
      entry.id = e.at("id").get<std::string>();
      if (e.contains("instruction")) entry.instruction = e["instruction"].get<std::string>();
      if (e.contains("seed_code")) entry.seed_code = e["seed_code"].get<std::string>();
      if (e.contains("expected_cwes")) e["expected_cwes"].get_to(entry.expected_cwes);
      if (e.contains("prompt_tokens")) entry.prompt_tokens = e["prompt_tokens"].get<std::int64_t>();
      if (e.contains("scenario")) {
        entry.scenario = std::make_shared<const llm::Scenario>(llm::Scenario::from_json(e["scenario"]));
      }
    } catch (const nlohmann::json::exception& ex) {
      throw std::invalid_argument("corpus entry " + std::to_string(corpus.entries.size()) + ": " + ex.what());
    } catch (const InvalidBackendConfig& ex) {
      throw std::invalid_argument("corpus entry '" + entry.id + "': " + ex.what());
    }
    if (entry.instruction.has_value() == entry.seed_code.has_value()) {
      throw std::invalid_argument("corpus entry '" + entry.id + "' needs exactly one of instruction or seed_code");
    }
    if (!seen.insert(entry.id).second) throw std::invalid_argument("duplicate corpus id '" + entry.id + "'");
    if (!e.contains("prompt_tokens")) {
      entry.prompt_tokens = llm::estimate_tokens(entry.instruction ? *entry.instruction : *entry.seed_code);
    }
    corpus.entries.push_back(std::move(entry));
  }
  return corpus;
}

Corpus Corpus::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open corpus " + path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("corpus " + path + " is not valid JSON: " + e.what());
  }
}

}  // namespace sgforge::bench
