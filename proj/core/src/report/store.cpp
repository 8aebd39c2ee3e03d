#include "sgforge/report/store.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "sgforge/error.hpp"

namespace sgforge::report {
namespace {

void require_id(std::string_view id) {
  if (!is_report_id(id)) throw ReportNotFound("no report with id '" + std::string(id) + "'");
}

SecurityReport decode_verified(std::string_view id, const std::string& text) {
  SecurityReport report;
  try {
    report = report_from_json(nlohmann::json::parse(text));
  } catch (const std::exception& e) {
    throw ReportCorrupted("report " + std::string(id) + " is unreadable: " + e.what());
  }
  if (report.report_id != id || compute_report_id(report) != id) {
    throw ReportCorrupted("report " + std::string(id) + " does not match its digest");
  }
  return report;
}

}  // namespace

FileReportStore::FileReportStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec || !std::filesystem::is_directory(dir_)) {
    throw StoreUnavailable("cannot use report directory " + dir_.string());
  }
}

std::filesystem::path FileReportStore::path_for(std::string_view report_id) const {
  return dir_ / (std::string(report_id) + ".json");
}

bool FileReportStore::available() const {
  std::error_code ec;
  return std::filesystem::is_directory(dir_, ec);
}

void FileReportStore::put(const SecurityReport& report) {
  if (!is_report_id(report.report_id)) throw StoreUnavailable("refusing to store a report without a valid id");
  std::lock_guard lock(write_mu_);
  const auto target = path_for(report.report_id);
  std::error_code ec;
  if (std::filesystem::exists(target, ec)) return;

  const auto tmp = dir_ / ("." + report.report_id + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << canonical_json(report);
    out.flush();
    if (!out) throw StoreUnavailable("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw StoreUnavailable("cannot publish " + target.string() + ": " + ec.message());
}

SecurityReport FileReportStore::get(std::string_view report_id) const {
  require_id(report_id);
  if (!available()) throw StoreUnavailable("report directory " + dir_.string() + " is missing");
  std::ifstream in(path_for(report_id), std::ios::binary);
  if (!in) throw ReportNotFound("no report with id '" + std::string(report_id) + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_verified(report_id, buf.str());
}

void MemoryReportStore::put(const SecurityReport& report) {
  std::unique_lock lock(mu_);
  docs_.try_emplace(report.report_id, canonical_json(report));
}

SecurityReport MemoryReportStore::get(std::string_view report_id) const {
  require_id(report_id);
  std::shared_lock lock(mu_);
  const auto it = docs_.find(report_id);
  if (it == docs_.end()) throw ReportNotFound("no report with id '" + std::string(report_id) + "'");
  return decode_verified(report_id, it->second);
}

ReportRepository::ReportRepository(std::shared_ptr<ReportStore> store)
    : store_(std::move(store)), worker_([this] { worker_loop(); }) {}

ReportRepository::~ReportRepository() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  work_cv_.notify_all();
  worker_.join();
}

std::string ReportRepository::persist_async(SecurityReport report) {
  if (!store_->available()) throw StoreUnavailable("report store is unavailable");
  if (report.report_id.empty()) report.report_id = compute_report_id(report);
  std::string id = report.report_id;
  {
    std::lock_guard lock(mu_);
    if (pending_.try_emplace(id, std::move(report)).second) queue_.push_back(id);
  }
  work_cv_.notify_one();
  return id;
}

std::string ReportRepository::persist(const SecurityReport& report) {
  SecurityReport copy = report;
  if (copy.report_id.empty()) copy.report_id = compute_report_id(copy);
  store_->put(copy);
  return copy.report_id;
}

SecurityReport ReportRepository::fetch(std::string_view report_id) const {
  {
    std::lock_guard lock(mu_);
    const auto it = pending_.find(report_id);
    if (it != pending_.end()) return it->second;
  }
  return store_->get(report_id);
}

void ReportRepository::flush() {
  std::unique_lock lock(mu_);
  idle_cv_.wait(lock, [this] { return queue_.empty() && !busy_; });
}

void ReportRepository::worker_loop() {
  std::unique_lock lock(mu_);
  for (;;) {
    work_cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
    if (queue_.empty()) return;  // stopping with nothing left to drain
    const std::string id = queue_.front();
    queue_.pop_front();
    const SecurityReport report = pending_.at(id);
    busy_ = true;
    lock.unlock();
    try {
      store_->put(report);
    } catch (const std::exception& e) {
      ++failed_;
      std::cerr << "sgforge: background persistence of report " << id << " failed: " << e.what() << '\n';
    }
    lock.lock();
    pending_.erase(id);
    busy_ = false;
    if (queue_.empty()) idle_cv_.notify_all();
  }
}

}  // namespace sgforge::report
