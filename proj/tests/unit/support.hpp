#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "sgforge/llm/types.hpp"

namespace sgforge::test {

inline std::string data_path(const std::string& rel) { return std::string(SGFORGE_TEST_DATA_DIR) + "/" + rel; }

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline nlohmann::json read_json(const std::filesystem::path& p) { return nlohmann::json::parse(read_text(p)); }

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

// Unique scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("sgforge-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string fenced(const std::string& code) { return "```python\n" + code + "```\n"; }

// Scripted backend whose replies are the given code blocks, in order.
inline llm::BackendConfig scripted(const std::vector<std::string>& replies, int latency_ms = 0) {
  llm::Scenario scenario;
  for (const auto& r : replies) scenario.entries.push_back({std::nullopt, fenced(r), std::nullopt, std::nullopt, 0});
  llm::BackendConfig config;
  config.kind = llm::BackendKind::Scripted;
  config.scenario = std::make_shared<const llm::Scenario>(std::move(scenario));
  config.latency_override_ms = latency_ms;
  return config;
}

inline llm::BackendConfig scripted_file(const std::string& path, int latency_ms) {
  llm::BackendConfig config;
  config.kind = llm::BackendKind::Scripted;
  config.scenario = std::make_shared<const llm::Scenario>(llm::Scenario::load(path));
  config.latency_override_ms = latency_ms;
  return config;
}

// Snippets with a known number of built-in findings.
inline const std::string kThreeFindings =
    "import hashlib\nimport os\n\n\ndef backup(host, data):\n    password = \"hunter2-admin\"\n"
    "    os.system(\"scp backup.tar \" + host + \":/srv\")\n    return hashlib.md5(data).hexdigest(), password\n";
inline const std::string kOneFinding = "import hashlib\n\n\ndef digest(data):\n    return hashlib.md5(data).hexdigest()\n";
inline const std::string kClean = "import hashlib\n\n\ndef digest(data):\n    return hashlib.sha256(data).hexdigest()\n";

}  // namespace sgforge::test
