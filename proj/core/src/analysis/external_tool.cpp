#include "sgforge/analysis/external_tool.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "sgforge/analysis/python_lexer.hpp"
#include "sgforge/digest.hpp"
#include "sgforge/error.hpp"

extern char** environ;

namespace sgforge::analysis {
namespace {

// Owns a temporary file holding the source under analysis.
class TempSourceFile {
 public:
  explicit TempSourceFile(std::string_view source) {
    const auto dir = std::filesystem::temp_directory_path();
    std::string pattern = (dir / "sgforge-XXXXXX.py").string();
    const int fd = ::mkstemps(pattern.data(), 3);
    if (fd < 0) throw AnalyzerUnavailable(std::string("cannot create temp file: ") + std::strerror(errno));
    path_ = pattern;
    std::size_t written = 0;
    while (written < source.size()) {
      const ssize_t n = ::write(fd, source.data() + written, source.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        ::close(fd);
        throw AnalyzerUnavailable("cannot write temp file");
      }
      written += static_cast<std::size_t>(n);
    }
    ::close(fd);
  }
  ~TempSourceFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  TempSourceFile(const TempSourceFile&) = delete;
  TempSourceFile& operator=(const TempSourceFile&) = delete;

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

std::vector<std::string> build_argv(const std::string& command, const std::string& file) {
  std::vector<std::string> argv;
  std::istringstream in(command);
  std::string word;
  while (in >> word) {
    const auto pos = word.find("{file}");
    if (pos != std::string::npos) word.replace(pos, 6, file);
    argv.push_back(word);
  }
  return argv;
}

struct ProcessOutput {
  std::string out;
  int status = 0;
};

ProcessOutput run_process(const std::vector<std::string>& args, double timeout_seconds) {
  if (args.empty()) throw AnalyzerUnavailable("empty command template");

  int out_pipe[2];
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) throw AnalyzerUnavailable("pipe() failed");

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, "/dev/null", O_WRONLY, 0);

  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  pid_t pid = 0;
  const int rc = ::posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(out_pipe[1]);
  if (rc != 0) {
    ::close(out_pipe[0]);
    throw AnalyzerUnavailable("cannot start '" + args[0] + "': " + std::strerror(rc));
  }

  ProcessOutput result;
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(timeout_seconds));
  std::array<char, 8192> buf{};
  bool timed_out = false;
  for (;;) {
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      timed_out = true;
      break;
    }
    pollfd pfd{out_pipe[0], POLLIN, 0};
    const int pr = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining.count(), 1000)));
    if (pr < 0 && errno != EINTR) break;
    if (pr <= 0) continue;
    const ssize_t n = ::read(out_pipe[0], buf.data(), buf.size());
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    result.out.append(buf.data(), static_cast<std::size_t>(n));
  }
  ::close(out_pipe[0]);
  if (timed_out) {
    ::kill(pid, SIGKILL);
    ::waitpid(pid, nullptr, 0);
    throw AnalyzerUnavailable("'" + args[0] + "' timed out after " +
                              std::to_string(timeout_seconds) + " s");
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status) && WEXITSTATUS(status) == 127) {
    throw AnalyzerUnavailable("'" + args[0] + "' could not be executed");
  }
  result.status = status;
  return result;
}

Level level_or_low(const nlohmann::json& v) {
  if (!v.is_string()) return Level::Low;
  try {
    return parse_level(v.get<std::string>());
  } catch (const std::invalid_argument&) {
    return Level::Low;
  }
}

}  // namespace

ExternalToolSpec bandit_tool_spec() {
  return ExternalToolSpec{"bandit", "bandit -f json -q {file}", std::string(kBanditJsonFormat), 30.0};
}

std::vector<Finding> parse_bandit_json(std::string_view json_text, std::string_view source) {
  const auto brace = json_text.find('{');
  if (brace == std::string_view::npos) throw UnparseableToolOutput("no JSON object in tool output");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text.substr(brace));
  } catch (const nlohmann::json::exception& e) {
    throw UnparseableToolOutput(std::string("invalid bandit JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("results") || !doc["results"].is_array()) {
    throw UnparseableToolOutput("bandit JSON lacks a results array");
  }

  const auto lines = split_lines(source);
  const int total = static_cast<int>(lines.size());
  std::vector<Finding> findings;
  for (const auto& r : doc["results"]) {
    if (!r.is_object() || total == 0) continue;
    Finding f;
    f.rule_id = r.value("test_id", std::string("UNKNOWN"));
    if (r.contains("issue_cwe") && r["issue_cwe"].is_object()) {
      f.cwe_id = r["issue_cwe"].value("id", 0);
    }
    f.severity = level_or_low(r.value("issue_severity", nlohmann::json()));
    f.confidence = level_or_low(r.value("issue_confidence", nlohmann::json()));
    f.message = r.value("issue_text", std::string());
    const int line = std::clamp(r.value("line_number", 1), 1, total);
    f.line_start = line;
    f.line_end = line;
    f.snippet = std::string(lines[static_cast<std::size_t>(line - 1)]);
    findings.push_back(std::move(f));
  }
  std::sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
    return std::tie(a.line_start, a.rule_id) < std::tie(b.line_start, b.rule_id);
  });
  return findings;
}

AnalysisResult run_external_analyzer(const ExternalToolSpec& tool, std::string_view source) {
  if (tool.output_format != kBanditJsonFormat) {
    throw AnalyzerUnavailable("unsupported output format: " + tool.output_format);
  }
  if (tool.command.find("{file}") == std::string::npos) {
    throw AnalyzerUnavailable("command template lacks a {file} placeholder");
  }
  AnalysisResult result;
  result.analyzer_name = tool.name;
  result.source_fingerprint = sha256_hex(source);

  TempSourceFile file(source);
  const auto start = std::chrono::steady_clock::now();
  const auto output = run_process(build_argv(tool.command, file.path()), tool.timeout_seconds);
  result.findings = parse_bandit_json(output.out, source);
  result.analysis_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace sgforge::analysis
