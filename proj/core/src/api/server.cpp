#include "sgforge/api/server.hpp"

#include <algorithm>
#include <deque>
#include <iostream>
#include <random>
#include <thread>

#include <httplib.h>

#include "sgforge/analysis/json.hpp"
#include "sgforge/error.hpp"
#include "sgforge/llm/types.hpp"
#include "sgforge/pipeline/prefs.hpp"
#include "sgforge/report/html.hpp"

namespace sgforge::api {
namespace {

using nlohmann::json;

constexpr std::size_t kMaxBodyBytes = 8 * 1024 * 1024;
constexpr std::size_t kMaxTraces = 256;

// Stands in when the configured store cannot be opened.
class OfflineStore final : public report::ReportStore {
 public:
  explicit OfflineStore(std::string reason) : reason_(std::move(reason)) {}
  void put(const report::SecurityReport&) override { throw StoreUnavailable(reason_); }
  report::SecurityReport get(std::string_view) const override { throw StoreUnavailable(reason_); }
  bool available() const override { return false; }

 private:
  std::string reason_;
};

std::string dump(const json& doc) { return doc.dump(-1, ' ', false, json::error_handler_t::replace); }

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(dump(body), "application/json");
}

json envelope(std::string_view code, const std::string& message, json detail = json::object()) {
  return json{{"error_code", code}, {"message", message}, {"detail", std::move(detail)}};
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message,
                json detail = json::object()) {
  send_json(res, status, envelope(code, message, std::move(detail)));
}

std::string new_trace_id() {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id(16, '0');
  auto bits = rng();
  for (auto& c : id) {
    c = kHex[bits & 0xf];
    bits >>= 4;
  }
  return id;
}

bool is_backend_failure(const std::string& code) {
  return code == "BackendRejected" || code == "BackendTimeout" || code == "MalformedResponse" ||
         code == "ScenarioMismatch";
}

json usage_json(const pipeline::PipelineResult& r) {
  return json{{"prompt_tokens", r.total_usage.prompt_tokens},
              {"output_tokens", r.total_usage.output_tokens},
              {"llm_calls", r.llm_calls}};
}

json trace_json(const std::vector<pipeline::IterationRecord>& iterations) {
  json out = json::array();
  for (const auto& it : iterations) {
    json cwes = json::array();
    for (const auto& f : it.findings.findings) cwes.push_back(f.cwe_id);
    out.push_back({{"index", it.index},
                   {"finding_count", it.findings.findings.size()},
                   {"cwes", cwes},
                   {"llm_called", it.llm_called},
                   {"timings", it.timings}});
  }
  return out;
}

}  // namespace

void Metrics::record_run(const pipeline::PipelineResult& result) {
  std::lock_guard lock(mu_);
  ++runs_total_;
  stage_seconds_ += result.aggregate_timings;
  for (const auto& f : result.original_findings().findings) ++cwe_counts_[f.cwe_id];
}

json Metrics::to_json() const {
  std::lock_guard lock(mu_);
  json cwes = json::object();
  for (const auto& [cwe, count] : cwe_counts_) cwes[std::to_string(cwe)] = count;
  return json{{"runs_total", runs_total_}, {"stage_seconds", stage_seconds_}, {"cwe_finding_counts", cwes}};
}

struct ApiServer::Impl {
  ServiceConfig config;
  pipeline::PrefsContext prefs_ctx;
  report::ReportRepository repo;
  Metrics metrics;
  httplib::Server http;
  std::thread thread;

  std::mutex trace_mu;
  std::deque<std::string> trace_order;
  std::map<std::string, json, std::less<>> traces;

  Impl(ServiceConfig cfg, std::shared_ptr<report::ReportStore> store)
      : config(std::move(cfg)), repo(store ? std::move(store) : open_store(config.store_dir)) {
    prefs_ctx.default_backend = config.default_backend;
    prefs_ctx.named_analyzers = config.external_analyzers;
    prefs_ctx.trusted = false;
    prefs_ctx.allow_scripted = config.allow_scripted;
    routes();
  }

  static std::shared_ptr<report::ReportStore> open_store(const std::string& dir) {
    try {
      return std::make_shared<report::FileReportStore>(dir);
    } catch (const StoreUnavailable& e) {
      std::cerr << "sgforge: reports disabled: " << e.what() << '\n';
      return std::make_shared<OfflineStore>(e.what());
    }
  }

  // Scrubs every credential this request could have touched.
  std::string scrub(std::string text, const std::string& request_key) const {
    return redact(redact(std::move(text), config.default_backend.api_key), request_key);
  }

  void remember_trace(const std::string& id, json trace) {
    std::lock_guard lock(trace_mu);
    traces[id] = std::move(trace);
    trace_order.push_back(id);
    if (trace_order.size() > kMaxTraces) {
      traces.erase(trace_order.front());
      trace_order.pop_front();
    }
  }

  static bool parse_body(const httplib::Request& req, httplib::Response& res, json& body) {
    try {
      body = json::parse(req.body);
    } catch (const json::exception&) {
      send_error(res, 400, "MalformedBody", "request body is not valid JSON");
      return false;
    }
    if (!body.is_object()) {
      send_error(res, 400, "MalformedBody", "request body must be a JSON object");
      return false;
    }
    return true;
  }

  void generate(const httplib::Request& req, httplib::Response& res) {
    json body;
    if (!parse_body(req, res, body)) return;
    const bool has_instruction = body.contains("instruction") && !body["instruction"].is_null();
    const bool has_code = body.contains("code") && !body["code"].is_null();
    if (has_instruction == has_code) {
      send_error(res, 400, "InvalidRequest", "provide exactly one of 'instruction' or 'code'");
      return;
    }
    const json& payload = has_instruction ? body["instruction"] : body["code"];
    if (!payload.is_string()) {
      send_error(res, 400, "InvalidRequest", has_instruction ? "'instruction' must be a string" : "'code' must be a string");
      return;
    }
    const auto request = has_instruction ? pipeline::GenerationRequest::from_instruction(payload.get<std::string>())
                                         : pipeline::GenerationRequest::from_code(payload.get<std::string>());

    pipeline::PipelinePrefs prefs;
    try {
      prefs = pipeline::parse_prefs(body.contains("prefs") ? body["prefs"] : json(), prefs_ctx);
    } catch (const InvalidPrefs& e) {
      send_error(res, 422, e.code(), scrub(e.what(), ""));
      return;
    }
    const std::string request_key = prefs.backend.api_key;

    pipeline::PipelineResult result;
    try {
      result = pipeline::run(request, prefs);
    } catch (const InvalidPrefs& e) {
      send_error(res, 422, e.code(), scrub(e.what(), request_key));
      return;
    } catch (const InvalidRequest& e) {
      send_error(res, 400, e.code(), scrub(e.what(), request_key));
      return;
    } catch (const pipeline::PipelineAborted& e) {
      const std::string trace_id = new_trace_id();
      const json trace = trace_json(e.iterations_so_far());
      remember_trace(trace_id, json{{"cause", e.cause_code()}, {"iterations", trace}});
      const json detail = {{"trace_id", trace_id}, {"cause", e.cause_code()},
                           {"iterations_so_far", e.iterations_so_far().size()}};
      const std::string message = scrub(e.what(), request_key);
      if (e.cause_code() == "UnreadableSource" && e.iterations_so_far().empty() && has_code) {
        send_error(res, 400, e.cause_code(), message, detail);
      } else {
        send_error(res, 502, is_backend_failure(e.cause_code()) ? e.cause_code() : "AnalyzerFailed", message, detail);
      }
      return;
    }

    metrics.record_run(result);
    const auto report = report::build_report(result);
    json out = {{"final_code", result.final_code},
                {"secure", result.secure},
                {"summary", report.summary},
                {"timings", result.aggregate_timings},
                {"usage", usage_json(result)},
                {"mode", std::string(pipeline::to_string(result.mode))}};
    try {
      out["report_id"] = repo.persist_async(report);
      send_json(res, 200, out);
    } catch (const StoreUnavailable& e) {
      // The generated code is still returned; only the report is missing.
      out["report_id"] = nullptr;
      out.update(envelope("StoreUnavailable", scrub(e.what(), request_key)));
      send_json(res, 503, out);
    }
  }

  void analyze(const httplib::Request& req, httplib::Response& res) {
    json body;
    if (!parse_body(req, res, body)) return;
    if (!body.contains("code") || !body["code"].is_string()) {
      send_error(res, 400, "InvalidRequest", "'code' must be a string");
      return;
    }
    analysis::AnalyzerOptions options;
    try {
      options = pipeline::resolve_analyzer(body.contains("analyzer") ? body["analyzer"] : json(), prefs_ctx);
    } catch (const InvalidPrefs& e) {
      send_error(res, 422, e.code(), e.what());
      return;
    }
    try {
      send_json(res, 200, json(analysis::analyze(body["code"].get<std::string>(), options)));
    } catch (const UnreadableSource& e) {
      send_error(res, 400, e.code(), e.what());
    } catch (const Error& e) {
      send_error(res, 502, e.code(), scrub(e.what(), ""));
    }
  }

  template <class Render>
  void report_route(const httplib::Request& req, httplib::Response& res, Render&& render) {
    const std::string id = req.matches[1];
    try {
      render(repo.fetch(id));
    } catch (const ReportNotFound& e) {
      send_error(res, 404, e.code(), e.what());
    } catch (const StoreUnavailable& e) {
      send_error(res, 503, e.code(), e.what());
    } catch (const ReportCorrupted& e) {
      send_error(res, 500, e.code(), e.what());
    }
  }

  void routes() {
    http.new_task_queue = [n = config.worker_threads] { return new httplib::ThreadPool(static_cast<size_t>(n)); };
    http.set_payload_max_length(kMaxBodyBytes);

    http.Post("/api/generate", [this](const httplib::Request& req, httplib::Response& res) { generate(req, res); });
    http.Post("/api/analyze", [this](const httplib::Request& req, httplib::Response& res) { analyze(req, res); });
    http.Get(R"(/api/reports/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      report_route(req, res, [&](const report::SecurityReport& r) {
        res.status = 200;
        res.set_content(report::canonical_json(r), "application/json");
      });
    });
    http.Get(R"(/api/reports/([^/]+)/html)", [this](const httplib::Request& req, httplib::Response& res) {
      report_route(req, res, [&](const report::SecurityReport& r) {
        res.status = 200;
        res.set_content(report::render_html(r), "text/html; charset=utf-8");
      });
    });
    http.Get(R"(/api/traces/([0-9a-f]+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(trace_mu);
      const auto it = traces.find(std::string(req.matches[1]));
      if (it == traces.end()) {
        send_error(res, 404, "TraceNotFound", "no trace with that id");
      } else {
        send_json(res, 200, it->second);
      }
    });
    http.Get("/api/metrics", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, metrics.to_json());
    });
    http.Get("/api/health", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, json{{"status", "ok"}, {"store", repo.available() ? "ok" : "unavailable"}});
    });

    http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return;
      const bool missing = res.status == 404;
      send_json(res, res.status, envelope(missing ? "NotFound" : "HttpError",
                                          missing ? "no such endpoint" : "request failed"));
    });
    http.set_exception_handler([this](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string what = "unexpected failure";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      send_error(res, 500, "InternalError", scrub(what, ""));
    });
  }
};

ApiServer::ApiServer(ServiceConfig config, std::shared_ptr<report::ReportStore> store)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(store))) {}

ApiServer::~ApiServer() {
  stop();
  impl_->repo.flush();
}

int ApiServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->http.bind_to_any_port(host) : (impl_->http.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void ApiServer::serve() { impl_->http.listen_after_bind(); }

void ApiServer::start() {
  impl_->thread = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
}

void ApiServer::stop() {
  if (impl_->http.is_running()) impl_->http.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

report::ReportRepository& ApiServer::reports() { return impl_->repo; }

const Metrics& ApiServer::metrics() const { return impl_->metrics; }

}  // namespace sgforge::api
