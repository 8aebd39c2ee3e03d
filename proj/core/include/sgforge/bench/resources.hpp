#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "sgforge/bench/corpus.hpp"
#include "sgforge/pipeline/pipeline.hpp"

namespace sgforge::bench {

struct ProcessSnapshot {
  double cpu_seconds = 0.0;  // user + system
  double rss_mb = 0.0;
};

// Reads /proc/self/stat and /proc/self/status. Throws std::runtime_error.
ProcessSnapshot read_process_snapshot();

struct ResourceUsage {
  std::string label;
  double cpu_fraction_mean = 0.0;  // CPU seconds per wall second, averaged over samples
  double memory_mb_peak = 0.0;     // highest sampled resident set size
  std::size_t samples = 0;
};

// Samples this process on a background thread until stop().
class ResourceSampler {
 public:
  explicit ResourceSampler(std::chrono::milliseconds interval = std::chrono::milliseconds(100));
  ~ResourceSampler();

  ResourceSampler(const ResourceSampler&) = delete;
  ResourceSampler& operator=(const ResourceSampler&) = delete;

  void start();
  ResourceUsage stop();

 private:
  void loop();

  std::chrono::milliseconds interval_;
  std::atomic<bool> running_{false};
  std::mutex mu_;
  std::condition_variable wake_;
  std::thread thread_;
  std::vector<double> cpu_fractions_;
  double peak_mb_ = 0.0;
};

ResourceUsage measure_resources(const std::string& label, const std::function<void()>& work,
                                std::chrono::milliseconds interval = std::chrono::milliseconds(100));

struct ResourceComparison {
  ResourceUsage with_optimizer;     // PROMSEC over the corpus
  ResourceUsage without_optimizer;  // SAFECODER_STANDALONE over the corpus
};

ResourceComparison sample_resources(const Corpus& corpus, const pipeline::PipelinePrefs& prefs, int parallel = 1);

std::string render_resources_text(const ResourceComparison& cmp);
std::string render_resources_csv(const ResourceComparison& cmp);

}  // namespace sgforge::bench
