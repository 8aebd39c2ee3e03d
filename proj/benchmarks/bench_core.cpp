#include <benchmark/benchmark.h>

#include <string>

#include "sgforge/analysis/analyzer.hpp"
#include "sgforge/optimizer/code_graph.hpp"
#include "sgforge/report/diff.hpp"

namespace {

std::string sample_source(int copies) {
  const std::string unit =
      "import hashlib\nimport os\n\n\ndef backup(host, data):\n    password = \"hunter2-admin\"\n"
      "    os.system(\"scp backup.tar \" + host + \":/srv\")\n    return hashlib.md5(data).hexdigest(), password\n\n";
  std::string out;
  for (int i = 0; i < copies; ++i) out += unit;
  return out;
}

void BM_Analyze(benchmark::State& state) {
  const auto source = sample_source(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sgforge::analysis::analyze(source));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * source.size()));
}
BENCHMARK(BM_Analyze)->Arg(1)->Arg(16)->Arg(128);

void BM_CodeGraph(benchmark::State& state) {
  const auto source = sample_source(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sgforge::optimizer::build_code_graph(source, std::size_t{1} << 20));
}
BENCHMARK(BM_CodeGraph)->Arg(1)->Arg(16)->Arg(128);

void BM_Diff(benchmark::State& state) {
  const auto a = sample_source(static_cast<int>(state.range(0)));
  std::string b = a;
  for (std::size_t pos = 0; (pos = b.find("md5", pos)) != std::string::npos;) b.replace(pos, 3, "sha256");
  for (auto _ : state) benchmark::DoNotOptimize(sgforge::report::diff_lines(a, b));
}
BENCHMARK(BM_Diff)->Arg(1)->Arg(16)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
