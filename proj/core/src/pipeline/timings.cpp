#include "sgforge/pipeline/timings.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sgforge::pipeline {

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Optimizer: return "optimizer";
    case Stage::Analysis: return "analysis";
    case Stage::Llm: return "llm";
    case Stage::Communication: return "communication";
  }
  return "optimizer";
}

StageTimings& StageTimings::operator+=(const StageTimings& other) {
  optimizer_seconds += other.optimizer_seconds;
  analysis_seconds += other.analysis_seconds;
  llm_seconds += other.llm_seconds;
  communication_seconds += other.communication_seconds;
  total_seconds += other.total_seconds;
  return *this;
}

void StageRecorder::record_stage(Stage stage, double seconds) {
  if (!std::isfinite(seconds) || seconds < 0.0) {
    throw std::invalid_argument("stage duration must be a finite value >= 0, got " + std::to_string(seconds));
  }
  switch (stage) {
    case Stage::Optimizer: timings_.optimizer_seconds += seconds; break;
    case Stage::Analysis: timings_.analysis_seconds += seconds; break;
    case Stage::Llm: timings_.llm_seconds += seconds; break;
    case Stage::Communication: timings_.communication_seconds += seconds; break;
  }
}

void StageRecorder::set_total(double seconds) {
  if (!std::isfinite(seconds) || seconds < 0.0) throw std::invalid_argument("total must be >= 0");
  timings_.total_seconds = std::max({seconds, timings_.optimizer_seconds, timings_.analysis_seconds,
                                     timings_.llm_seconds, timings_.communication_seconds});
}

void to_json(nlohmann::json& j, const StageTimings& t) {
  j = nlohmann::json{{"optimizer_seconds", t.optimizer_seconds},
                     {"analysis_seconds", t.analysis_seconds},
                     {"llm_seconds", t.llm_seconds},
                     {"communication_seconds", t.communication_seconds},
                     {"total_seconds", t.total_seconds}};
}

void from_json(const nlohmann::json& j, StageTimings& t) {
  j.at("optimizer_seconds").get_to(t.optimizer_seconds);
  j.at("analysis_seconds").get_to(t.analysis_seconds);
  j.at("llm_seconds").get_to(t.llm_seconds);
  j.at("communication_seconds").get_to(t.communication_seconds);
  j.at("total_seconds").get_to(t.total_seconds);
}

}  // namespace sgforge::pipeline
