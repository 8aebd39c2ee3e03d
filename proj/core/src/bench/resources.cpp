#include "sgforge/bench/resources.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sgforge/bench/tables.hpp"

namespace sgforge::bench {

ProcessSnapshot read_process_snapshot() {
  ProcessSnapshot snap;

  std::ifstream stat("/proc/self/stat");
  std::string text;
  if (!stat || !std::getline(stat, text)) throw std::runtime_error("cannot read /proc/self/stat");
  // The command name may contain spaces; fields resume after the last ')'.
  const auto close = text.rfind(')');
  if (close == std::string::npos) throw std::runtime_error("unexpected /proc/self/stat format");
  std::istringstream fields(text.substr(close + 2));
  std::string field;
  unsigned long long utime = 0, stime = 0;
  // Field 3 (state) is first here; utime and stime are fields 14 and 15.
  for (int i = 3; i <= 15 && fields >> field; ++i) {
    if (i == 14) utime = std::stoull(field);
    if (i == 15) stime = std::stoull(field);
  }
  snap.cpu_seconds = static_cast<double>(utime + stime) / static_cast<double>(::sysconf(_SC_CLK_TCK));

  std::ifstream status("/proc/self/status");
  for (std::string line; std::getline(status, line);) {
    if (line.rfind("VmRSS:", 0) == 0) {
      snap.rss_mb = std::stod(line.substr(6)) / 1024.0;  // reported in kB
      break;
    }
  }
  return snap;
}

ResourceSampler::ResourceSampler(std::chrono::milliseconds interval) : interval_(interval) {}

ResourceSampler::~ResourceSampler() {
  if (running_) stop();
}

void ResourceSampler::start() {
  cpu_fractions_.clear();
  peak_mb_ = read_process_snapshot().rss_mb;
  running_ = true;
  thread_ = std::thread([this] { loop(); });
}

void ResourceSampler::loop() {
  using clock = std::chrono::steady_clock;
  auto last = read_process_snapshot();
  auto last_time = clock::now();
  for (bool more = true; more;) {
    {
      std::unique_lock lock(mu_);
      more = !wake_.wait_for(lock, interval_, [this] { return !running_; });
    }
    // One closing sample covers the partial interval, so short runs still report.
    const auto snap = read_process_snapshot();
    const auto now = clock::now();
    const double wall = std::chrono::duration<double>(now - last_time).count();
    if (wall > 0) cpu_fractions_.push_back(std::max(0.0, snap.cpu_seconds - last.cpu_seconds) / wall);
    peak_mb_ = std::max(peak_mb_, snap.rss_mb);
    last = snap;
    last_time = now;
  }
}

ResourceUsage ResourceSampler::stop() {
  {
    std::lock_guard lock(mu_);
    running_ = false;
  }
  wake_.notify_all();
  if (thread_.joinable()) thread_.join();
  ResourceUsage usage;
  usage.samples = cpu_fractions_.size();
  usage.memory_mb_peak = peak_mb_;
  if (!cpu_fractions_.empty()) {
    usage.cpu_fraction_mean = std::accumulate(cpu_fractions_.begin(), cpu_fractions_.end(), 0.0) /
                              static_cast<double>(cpu_fractions_.size());
  }
  return usage;
}

ResourceUsage measure_resources(const std::string& label, const std::function<void()>& work,
                                std::chrono::milliseconds interval) {
  ResourceSampler sampler(interval);
  sampler.start();
  try {
    work();
  } catch (...) {
    sampler.stop();
    throw;
  }
  auto usage = sampler.stop();
  usage.label = label;
  return usage;
}

ResourceComparison sample_resources(const Corpus& corpus, const pipeline::PipelinePrefs& prefs, int parallel) {
  auto with = prefs;
  with.mode = pipeline::Mode::PromSec;
  auto without = prefs;
  without.mode = pipeline::Mode::SafeCoderStandalone;

  ResourceComparison cmp;
  // Baseline first so allocator growth from the earlier run is not charged to it.
  cmp.without_optimizer = measure_resources("No PromSec", [&] { run_corpus(corpus, without, parallel); });
  cmp.with_optimizer = measure_resources("PromSec", [&] { run_corpus(corpus, with, parallel); });
  return cmp;
}

namespace {

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string render_resources_text(const ResourceComparison& cmp) {
  std::string out = "              CPU (Percentage)  Memory (MB)\n";
  for (const auto* u : {&cmp.with_optimizer, &cmp.without_optimizer}) {
    std::string label = u->label;
    label.resize(12, ' ');
    std::string cpu = fmt(u->cpu_fraction_mean * 100.0, 2);
    std::string mem = fmt(u->memory_mb_peak, 2);
    out += label + "  " + std::string(16 - std::min<std::size_t>(16, cpu.size()), ' ') + cpu + "  " +
           std::string(11 - std::min<std::size_t>(11, mem.size()), ' ') + mem + "\n";
  }
  return out;
}

std::string render_resources_csv(const ResourceComparison& cmp) {
  std::string out = ",CPU (Percentage),Memory (MB)\n";
  for (const auto* u : {&cmp.with_optimizer, &cmp.without_optimizer}) {
    out += u->label + "," + fmt(u->cpu_fraction_mean * 100.0, 2) + "," + fmt(u->memory_mb_peak, 2) + "\n";
  }
  return out;
}

}  // namespace sgforge::bench
