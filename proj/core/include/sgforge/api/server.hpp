#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <nlohmann/json.hpp>

#include "sgforge/api/config.hpp"
#include "sgforge/pipeline/pipeline.hpp"
#include "sgforge/report/store.hpp"

namespace sgforge::api {

// Service counters. Safe to update from concurrent requests.
class Metrics {
 public:
  void record_run(const pipeline::PipelineResult& result);
  nlohmann::json to_json() const;

 private:
  mutable std::mutex mu_;
  std::int64_t runs_total_ = 0;
  pipeline::StageTimings stage_seconds_;
  std::map<int, std::int64_t> cwe_counts_;
};

// HTTP/JSON front end:
//   POST /api/generate, POST /api/analyze, GET /api/reports/{id},
//   GET /api/reports/{id}/html, GET /api/traces/{id}, GET /api/metrics,
//   GET /api/health.
// Errors use the envelope {"error_code", "message", "detail"}.
class ApiServer {
 public:
  // Without an explicit store, a FileReportStore over config.store_dir is
  // used; if that cannot be opened the service runs with reports disabled.
  explicit ApiServer(ServiceConfig config, std::shared_ptr<report::ReportStore> store = nullptr);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Binds the listening socket; port 0 picks a free port. Returns the bound
  // port. Throws std::runtime_error.
  int bind(const std::string& host, int port);

  void serve();  // blocks until stop()
  void start();  // serve() on a background thread
  void stop();

  report::ReportRepository& reports();
  const Metrics& metrics() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sgforge::api
