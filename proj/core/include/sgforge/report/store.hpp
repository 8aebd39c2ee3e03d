#pragma once

#include <atomic>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <thread>

#include "sgforge/report/report.hpp"

namespace sgforge::report {

// Storage adapter. Implementations must tolerate concurrent calls.
class ReportStore {
 public:
  virtual ~ReportStore() = default;

  // Stores `report` under its report_id. Existing ids are left untouched.
  // Throws StoreUnavailable.
  virtual void put(const SecurityReport& report) = 0;

  // Throws ReportNotFound, ReportCorrupted or StoreUnavailable.
  virtual SecurityReport get(std::string_view report_id) const = 0;

  virtual bool available() const = 0;
};

// One canonical-JSON file per report, written via temp file + rename.
class FileReportStore final : public ReportStore {
 public:
  // Creates `dir` if needed. Throws StoreUnavailable.
  explicit FileReportStore(std::filesystem::path dir);

  void put(const SecurityReport& report) override;
  SecurityReport get(std::string_view report_id) const override;
  bool available() const override;

  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::filesystem::path path_for(std::string_view report_id) const;

  std::filesystem::path dir_;
  mutable std::mutex write_mu_;
};

class MemoryReportStore final : public ReportStore {
 public:
  void put(const SecurityReport& report) override;
  SecurityReport get(std::string_view report_id) const override;
  bool available() const override { return true; }

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, std::string, std::less<>> docs_;
};

// Front door used by the service: hands writes to a background worker so
// callers never wait on storage, and serves pending writes on fetch.
class ReportRepository {
 public:
  explicit ReportRepository(std::shared_ptr<ReportStore> store);
  ~ReportRepository();

  ReportRepository(const ReportRepository&) = delete;
  ReportRepository& operator=(const ReportRepository&) = delete;

  // Queues `report` and returns its id. Throws StoreUnavailable when the
  // store reports itself down.
  std::string persist_async(SecurityReport report);

  // Writes synchronously.
  std::string persist(const SecurityReport& report);

  SecurityReport fetch(std::string_view report_id) const;

  // Blocks until every queued write has been attempted.
  void flush();

  bool available() const { return store_->available(); }
  std::size_t failed_writes() const { return failed_.load(); }

 private:
  void worker_loop();

  std::shared_ptr<ReportStore> store_;
  mutable std::mutex mu_;
  std::condition_variable work_cv_;
  std::condition_variable idle_cv_;
  std::deque<std::string> queue_;
  std::map<std::string, SecurityReport, std::less<>> pending_;
  bool busy_ = false;
  bool stopping_ = false;
  std::atomic<std::size_t> failed_{0};
  std::thread worker_;
};

}  // namespace sgforge::report
