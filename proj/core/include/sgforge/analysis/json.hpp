#pragma once

#include <nlohmann/json.hpp>

#include "sgforge/analysis/analyzer.hpp"
#include "sgforge/analysis/finding.hpp"

namespace sgforge::analysis {

void to_json(nlohmann::json& j, const Finding& f);
void from_json(const nlohmann::json& j, Finding& f);
void to_json(nlohmann::json& j, const AnalysisResult& r);
void to_json(nlohmann::json& j, const RuleDescriptor& r);
void to_json(nlohmann::json& j, const ExternalToolSpec& t);
void from_json(const nlohmann::json& j, ExternalToolSpec& t);

}  // namespace sgforge::analysis
