#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgforge/analysis/analyzer.hpp"
#include "sgforge/error.hpp"
#include "sgforge/llm/types.hpp"
#include "sgforge/optimizer/deviation.hpp"
#include "sgforge/optimizer/registry.hpp"
#include "sgforge/pipeline/timings.hpp"

namespace sgforge::pipeline {

enum class Mode { PromSec, SafeCoderStandalone, Combined };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);  // throws InvalidPrefs

struct PipelinePrefs {
  Mode mode = Mode::PromSec;
  analysis::AnalyzerOptions analyzer;
  llm::BackendConfig backend;
  std::string optimizer_key = std::string(optimizer::kDefaultOptimizerKey);
  int max_iterations = 5;

  // Throws InvalidPrefs.
  void validate(const optimizer::OptimizerRegistry& registry) const;
};

enum class RequestKind { Instruction, UploadedCode };

struct GenerationRequest {
  RequestKind kind = RequestKind::Instruction;
  std::string instruction;
  std::string code;

  static GenerationRequest from_instruction(std::string text);
  static GenerationRequest from_code(std::string code);
};

struct IterationRecord {
  int index = 0;
  std::string code;
  analysis::AnalysisResult findings;
  StageTimings timings;
  llm::TokenUsage usage;  // zero for an uploaded iteration 0
  bool llm_called = false;
};

struct PipelineResult {
  Mode mode = Mode::PromSec;
  std::string instruction;
  std::string original_code;
  std::string final_code;
  std::vector<IterationRecord> iterations;
  std::size_t final_iteration = 0;  // index of the iteration final_code came from
  StageTimings aggregate_timings;
  llm::TokenUsage total_usage;
  int llm_calls = 0;
  bool secure = false;
  optimizer::DeviationVerdict deviation;

  const analysis::AnalysisResult& original_findings() const { return iterations.front().findings; }
  const analysis::AnalysisResult& final_findings() const { return iterations.at(final_iteration).findings; }
};

// A run that stopped on a backend or analyzer failure. Carries the iterations
// completed before the failure.
class PipelineAborted : public Error {
 public:
  PipelineAborted(std::string cause_code, const std::string& cause_message,
                  std::vector<IterationRecord> iterations_so_far);

  const std::string& cause_code() const noexcept { return cause_code_; }
  const std::vector<IterationRecord>& iterations_so_far() const noexcept { return iterations_; }

 private:
  std::string cause_code_;
  std::vector<IterationRecord> iterations_;
};

// Instruction used when uploaded code enters the optimization loop.
inline constexpr std::string_view kUploadedCodeInstruction =
    "Rewrite the following program so that it is free of security vulnerabilities "
    "while keeping its functionality.";

// Generate, analyze, then loop optimizer -> LLM -> analysis until the code
// is clean, the iteration budget is spent, or the finding count fails to
// drop for two consecutive rounds. Throws InvalidPrefs or PipelineAborted.
PipelineResult run(const GenerationRequest& request, const PipelinePrefs& prefs,
                   const optimizer::OptimizerRegistry& registry = optimizer::OptimizerRegistry::global());

// Non-empty lines of `code`; at least 1 so per-line ratios stay finite.
std::size_t non_empty_line_count(std::string_view code);

}  // namespace sgforge::pipeline
