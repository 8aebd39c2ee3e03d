#pragma once

#include <chrono>
#include <string_view>

#include <nlohmann/json.hpp>

namespace sgforge::pipeline {

enum class Stage { Optimizer, Analysis, Llm, Communication };

std::string_view to_string(Stage stage);

// Wall-clock seconds per pipeline stage plus the measured total.
struct StageTimings {
  double optimizer_seconds = 0.0;
  double analysis_seconds = 0.0;
  double llm_seconds = 0.0;
  double communication_seconds = 0.0;
  double total_seconds = 0.0;

  double component_sum() const {
    return optimizer_seconds + analysis_seconds + llm_seconds + communication_seconds;
  }

  StageTimings& operator+=(const StageTimings& other);

  friend bool operator==(const StageTimings&, const StageTimings&) = default;
};

// Accumulates stage durations for one iteration. Negative or non-finite
// durations are rejected with std::invalid_argument.
class StageRecorder {
 public:
  void record_stage(Stage stage, double seconds);

  const StageTimings& timings() const { return timings_; }
  void set_total(double seconds);

 private:
  StageTimings timings_;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void to_json(nlohmann::json& j, const StageTimings& t);
void from_json(const nlohmann::json& j, StageTimings& t);

}  // namespace sgforge::pipeline
