#include "sgforge/pipeline/pipeline.hpp"

#include <memory>

#include "sgforge/llm/backend.hpp"
#include "sgforge/llm/text.hpp"
#include "sgforge/optimizer/prompt.hpp"

namespace sgforge::pipeline {
namespace {

llm::ChatRequest generation_request(const std::string& instruction) {
  llm::ChatRequest req;
  req.messages.push_back({llm::Role::System, std::string(optimizer::code_only_system_prompt())});
  req.messages.push_back({llm::Role::User, instruction});
  return req;
}

std::size_t finding_count(const IterationRecord& r) { return r.findings.findings.size(); }

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::PromSec: return "PROMSEC";
    case Mode::SafeCoderStandalone: return "SAFECODER_STANDALONE";
    case Mode::Combined: return "COMBINED";
  }
  return "PROMSEC";
}

Mode parse_mode(std::string_view text) {
  if (text == "PROMSEC") return Mode::PromSec;
  if (text == "SAFECODER_STANDALONE") return Mode::SafeCoderStandalone;
  if (text == "COMBINED") return Mode::Combined;
  throw InvalidPrefs("unknown mode '" + std::string(text) + "'");
}

void PipelinePrefs::validate(const optimizer::OptimizerRegistry& registry) const {
  if (max_iterations < 1) throw InvalidPrefs("max_iterations must be >= 1");
  if (mode != Mode::SafeCoderStandalone && !registry.contains(optimizer_key)) {
    throw InvalidPrefs("unknown optimizer '" + optimizer_key + "'");
  }
  if (analyzer.external) {
    if (analyzer.external->output_format != analysis::kBanditJsonFormat) {
      throw InvalidPrefs("unsupported analyzer output format '" + analyzer.external->output_format + "'");
    }
    if (!(analyzer.external->timeout_seconds > 0.0)) throw InvalidPrefs("analyzer timeout must be positive");
  }
}

GenerationRequest GenerationRequest::from_instruction(std::string text) {
  return GenerationRequest{RequestKind::Instruction, std::move(text), {}};
}

GenerationRequest GenerationRequest::from_code(std::string code) {
  return GenerationRequest{RequestKind::UploadedCode, {}, std::move(code)};
}

PipelineAborted::PipelineAborted(std::string cause_code, const std::string& cause_message,
                                 std::vector<IterationRecord> iterations_so_far)
    : Error("PipelineAborted", cause_code + ": " + cause_message),
      cause_code_(std::move(cause_code)),
      iterations_(std::move(iterations_so_far)) {}

std::size_t non_empty_line_count(std::string_view code) {
  std::size_t count = 0;
  std::size_t start = 0;
  while (start <= code.size()) {
    auto nl = code.find('\n', start);
    if (nl == std::string_view::npos) nl = code.size();
    const auto line = code.substr(start, nl - start);
    if (line.find_first_not_of(" \t\r\f\v") != std::string_view::npos) ++count;
    start = nl + 1;
  }
  return count == 0 ? 1 : count;
}

PipelineResult run(const GenerationRequest& request, const PipelinePrefs& prefs,
                   const optimizer::OptimizerRegistry& registry) {
  prefs.validate(registry);
  if (request.kind == RequestKind::Instruction && request.instruction.empty()) {
    throw InvalidRequest("instruction must not be empty");
  }
  const bool standalone = prefs.mode == Mode::SafeCoderStandalone;

  // Built on first use: a clean upload never needs a backend. Instruction
  // requests validate it before any work is done.
  std::unique_ptr<llm::ChatBackend> backend;
  auto ensure_backend = [&] {
    if (backend) return;
    try {
      backend = llm::make_backend(prefs.backend);
    } catch (const InvalidBackendConfig& e) {
      throw InvalidPrefs(std::string("invalid backend: ") + e.what());
    }
  };
  if (request.kind == RequestKind::Instruction) ensure_backend();
  std::shared_ptr<const optimizer::PromptOptimizer> optimizer;
  if (!standalone) optimizer = registry.get(prefs.optimizer_key);

  PipelineResult result;
  result.mode = prefs.mode;
  result.instruction = request.kind == RequestKind::Instruction ? request.instruction
                                                                : std::string(kUploadedCodeInstruction);
  std::vector<IterationRecord>& its = result.iterations;

  auto call_llm = [&](const llm::ChatRequest& req, StageRecorder& rec, IterationRecord& record) {
    ensure_backend();
    const llm::ChatResponse resp = backend->complete(req);
    rec.record_stage(Stage::Llm, resp.llm_seconds);
    rec.record_stage(Stage::Communication, resp.communication_seconds);
    record.usage = resp.usage;
    record.llm_called = true;
    record.code = llm::extract_code(resp.content);
  };

  auto analyze_into = [&](StageRecorder& rec, IterationRecord& record) {
    record.findings = analysis::analyze(record.code, prefs.analyzer);
    rec.record_stage(Stage::Analysis, record.findings.analysis_seconds);
  };

  try {
    {
      Stopwatch sw;
      StageRecorder rec;
      IterationRecord first;
      first.index = 0;
      if (request.kind == RequestKind::Instruction) {
        call_llm(generation_request(request.instruction), rec, first);
      } else {
        first.code = request.code;
      }
      analyze_into(rec, first);
      rec.set_total(sw.seconds());
      first.timings = rec.timings();
      its.push_back(std::move(first));
    }

    std::size_t best = 0;
    int stale_rounds = 0;
    for (int round = 1; round <= prefs.max_iterations; ++round) {
      if (standalone || finding_count(its.back()) == 0 || stale_rounds >= 2) break;

      Stopwatch sw;
      StageRecorder rec;
      IterationRecord next;
      next.index = round;

      Stopwatch opt_sw;
      const llm::ChatRequest adjusted =
          optimizer->optimize(result.instruction, its.back().code, its.back().findings.findings);
      rec.record_stage(Stage::Optimizer, opt_sw.seconds());

      call_llm(adjusted, rec, next);
      analyze_into(rec, next);
      rec.set_total(sw.seconds());
      next.timings = rec.timings();

      const std::size_t previous = finding_count(its.back());
      const std::size_t current = finding_count(next);
      stale_rounds = current < previous ? 0 : stale_rounds + 1;
      its.push_back(std::move(next));
      if (current <= finding_count(its[best])) best = its.size() - 1;
    }
    result.final_iteration = best;
  } catch (const PipelineAborted&) {
    throw;
  } catch (const InvalidPrefs&) {
    throw;
  } catch (const Error& e) {
    throw PipelineAborted(e.code(), e.what(), its);
  }

  result.original_code = its.front().code;
  result.final_code = its[result.final_iteration].code;
  result.secure = its.back().findings.findings.empty();
  for (const auto& r : its) {
    result.aggregate_timings += r.timings;
    result.total_usage.prompt_tokens += r.usage.prompt_tokens;
    result.total_usage.output_tokens += r.usage.output_tokens;
    if (r.llm_called) {
      ++result.llm_calls;
      result.total_usage.source = r.usage.source;
    }
  }
  result.deviation = optimizer::assess_functionality_deviation(result.original_code, result.final_code);
  return result;
}

}  // namespace sgforge::pipeline
