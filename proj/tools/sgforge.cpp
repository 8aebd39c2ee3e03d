// sgforge: command-line front end for analysis, generation, benchmarking and
// the HTTP service.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sgforge/analysis/analyzer.hpp"
#include "sgforge/analysis/json.hpp"
#include "sgforge/api/config.hpp"
#include "sgforge/api/server.hpp"
#include "sgforge/bench/corpus.hpp"
#include "sgforge/bench/resources.hpp"
#include "sgforge/bench/tables.hpp"
#include "sgforge/error.hpp"
#include "sgforge/pipeline/pipeline.hpp"
#include "sgforge/pipeline/prefs.hpp"
#include "sgforge/report/html.hpp"
#include "sgforge/report/report.hpp"
#include "sgforge/report/store.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

sgforge::pipeline::PrefsContext cli_context(const std::string& prefs_path) {
  sgforge::pipeline::PrefsContext ctx;
  ctx.default_backend = sgforge::api::ServiceConfig::from_env().default_backend;
  ctx.named_analyzers.emplace("bandit", sgforge::analysis::bandit_tool_spec());
  ctx.trusted = true;
  if (!prefs_path.empty()) ctx.base_dir = fs::absolute(prefs_path).parent_path().string();
  return ctx;
}

sgforge::pipeline::PipelinePrefs load_prefs(const std::string& path) {
  const auto ctx = cli_context(path);
  if (path.empty()) return sgforge::pipeline::parse_prefs(json(), ctx);
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw sgforge::InvalidPrefs("prefs file " + path + " is not valid JSON: " + e.what());
  }
  return sgforge::pipeline::parse_prefs(doc, ctx);
}

std::string level(sgforge::analysis::Level l) { return std::string(sgforge::analysis::to_string(l)); }

void print_findings(const sgforge::analysis::AnalysisResult& result, const std::string& label) {
  for (const auto& f : result.findings) {
    std::cout << label << ":" << f.line_start << ": [" << f.rule_id << "] CWE-" << f.cwe_id << " severity="
              << level(f.severity) << " confidence=" << level(f.confidence) << "  " << f.message << "\n";
  }
  std::cout << result.findings.size() << " finding(s) from " << result.analyzer_name << "\n";
}

int cmd_analyze(const std::string& file, const std::string& analyzer, bool as_json) {
  const auto ctx = cli_context("");
  const auto options = sgforge::pipeline::resolve_analyzer(json(analyzer), ctx);
  const auto result = sgforge::analysis::analyze(read_file(file), options);
  if (as_json) {
    std::cout << json(result).dump(2) << "\n";
  } else {
    print_findings(result, file);
  }
  return 0;
}

int cmd_generate(const std::string& instruction, const std::string& code_file, const std::string& prefs_path,
                 const std::string& report_dir, bool as_json) {
  const auto prefs = load_prefs(prefs_path);
  const auto request = code_file.empty() ? sgforge::pipeline::GenerationRequest::from_instruction(instruction)
                                         : sgforge::pipeline::GenerationRequest::from_code(read_file(code_file));
  const auto result = sgforge::pipeline::run(request, prefs);
  const auto report = sgforge::report::build_report(result);
  if (!report_dir.empty()) {
    sgforge::report::FileReportStore store(report_dir);
    store.put(report);
  }
  if (as_json) {
    json out = {{"final_code", result.final_code},
                {"secure", result.secure},
                {"report_id", report.report_id},
                {"summary", report.summary},
                {"timings", result.aggregate_timings},
                {"usage", {{"prompt_tokens", result.total_usage.prompt_tokens},
                           {"output_tokens", result.total_usage.output_tokens},
                           {"llm_calls", result.llm_calls}}},
                {"mode", std::string(sgforge::pipeline::to_string(result.mode))}};
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  std::cout << result.final_code;
  if (!result.final_code.empty() && result.final_code.back() != '\n') std::cout << "\n";
  const auto& s = report.summary;
  std::cerr << "mode=" << sgforge::pipeline::to_string(result.mode) << " iterations=" << result.iterations.size()
            << " llm_calls=" << result.llm_calls << " secure=" << (result.secure ? "yes" : "no")
            << " identified=" << s.identified << " fixed=" << s.fixed << " remaining=" << s.remaining
            << " report_id=" << report.report_id << "\n";
  return 0;
}

int cmd_bench(const std::string& group, const std::string& corpus_path, const std::string& prefs_path,
              const std::string& out, int parallel, bool resources) {
  const auto corpus = sgforge::bench::Corpus::load(corpus_path);
  const auto prefs = load_prefs(prefs_path);
  if (parallel > 1) std::cerr << "warning: --parallel " << parallel << " makes timing columns load-dependent\n";

  if (resources) {
    const auto cmp = sgforge::bench::sample_resources(corpus, prefs, parallel);
    std::cout << (out == "csv" ? sgforge::bench::render_resources_csv(cmp) : sgforge::bench::render_resources_text(cmp));
    return 0;
  }

  const auto grouping = sgforge::bench::parse_grouping(group);
  const auto run = sgforge::bench::run_corpus(corpus, prefs, parallel);
  for (const auto& [id, reason] : run.failures) std::cerr << "warning: entry " << id << " failed: " << reason << "\n";
  const auto table = sgforge::bench::group_runs(run.records, grouping);
  std::cout << (out == "csv" ? sgforge::bench::render_csv(table) : sgforge::bench::render_text(table));
  return run.records.empty() && !corpus.entries.empty() ? 1 : 0;
}

int cmd_serve(const std::string& addr, const std::string& config_path) {
  auto config = sgforge::api::ServiceConfig::from_env();
  if (!config_path.empty()) config.apply_file(config_path);
  if (!addr.empty()) std::tie(config.listen_host, config.listen_port) = sgforge::api::parse_listen_address(addr);

  // Handle SIGINT/SIGTERM synchronously on this thread.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  const std::string host = config.listen_host;
  const int requested = config.listen_port;
  sgforge::api::ApiServer server(std::move(config));
  const int port = server.bind(host, requested);
  server.start();
  std::cerr << "sgforge: listening on http://" << host << ":" << port << "\n";

  int sig = 0;
  sigwait(&signals, &sig);
  std::cerr << "sgforge: shutting down\n";
  server.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sgforge: secure code generation pipeline"};
  app.require_subcommand(1);

  std::string analyze_file, analyzer = "builtin";
  bool analyze_json = false;
  auto* analyze = app.add_subcommand("analyze", "Scan a Python file for CWE vulnerabilities");
  analyze->add_option("file", analyze_file, "Python source file")->required()->check(CLI::ExistingFile);
  analyze->add_option("--analyzer", analyzer, "builtin or bandit");
  analyze->add_flag("--json", analyze_json, "Print the analysis result as JSON");

  std::string instruction, code_file, gen_prefs, report_dir;
  bool gen_json = false;
  auto* generate = app.add_subcommand("generate", "Generate code and iterate until it is secure");
  auto* instr_opt = generate->add_option("--instruction", instruction, "Natural-language task");
  auto* code_opt = generate->add_option("--code-file", code_file, "Secure an existing file instead")->check(CLI::ExistingFile);
  instr_opt->excludes(code_opt);
  generate->add_option("--prefs", gen_prefs, "Pipeline preferences JSON")->check(CLI::ExistingFile);
  generate->add_option("--report-dir", report_dir, "Also persist the security report here");
  generate->add_flag("--json", gen_json, "Print the response as JSON");

  std::string group = "vuln", corpus, bench_prefs, out = "text";
  int parallel = 1;
  bool resources = false;
  auto* bench = app.add_subcommand("bench", "Latency tables grouped by vulnerability count, CWE or prompt length");
  bench->add_option("--group", group, "vuln, cwe or length")->check(CLI::IsMember({"vuln", "cwe", "length"}));
  bench->add_option("--corpus", corpus, "Corpus JSON")->required()->check(CLI::ExistingFile);
  bench->add_option("--prefs", bench_prefs, "Pipeline preferences JSON")->check(CLI::ExistingFile);
  bench->add_option("--out", out, "csv or text")->check(CLI::IsMember({"csv", "text"}));
  bench->add_option("--parallel", parallel, "Run entries on N threads")->check(CLI::PositiveNumber);
  bench->add_flag("--resources", resources, "Compare CPU and memory with and without the optimizer");

  std::string addr, config_path;
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--addr", addr, "HOST:PORT (default 127.0.0.1:8080 or SGFORGE_LISTEN)");
  serve->add_option("--config", config_path, "Service config JSON")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  const std::string secret = sgforge::api::ServiceConfig::from_env().default_backend.api_key;
  try {
    if (*analyze) return cmd_analyze(analyze_file, analyzer, analyze_json);
    if (*generate) {
      if (instruction.empty() && code_file.empty()) {
        std::cerr << "generate: one of --instruction or --code-file is required\n";
        return 2;
      }
      return cmd_generate(instruction, code_file, gen_prefs, report_dir, gen_json);
    }
    if (*bench) return cmd_bench(group, corpus, bench_prefs, out, parallel, resources);
    if (*serve) return cmd_serve(addr, config_path);
  } catch (const sgforge::pipeline::PipelineAborted& e) {
    std::cerr << "error: " << sgforge::redact(e.what(), secret) << " (after " << e.iterations_so_far().size()
              << " iteration(s))\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << sgforge::redact(e.what(), secret) << "\n";
    return 1;
  }
  return 0;
}
