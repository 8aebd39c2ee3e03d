#include "sgforge/analysis/rules.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <stdexcept>
#include <string>

namespace sgforge::analysis {
namespace {

using Tokens = std::vector<Token>;

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
  bool empty() const { return begin >= end; }
  std::size_t size() const { return end - begin; }
};

struct Call {
  std::string resolved;  // callee with import aliases expanded
  std::size_t name_begin = 0;
  std::size_t open = 0;
  std::size_t close = 0;  // index of ')' or tokens.size() when unbalanced
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool ends_with_component(std::string_view name, std::string_view suffix) {
  if (name == suffix) return true;
  return name.size() > suffix.size() && name.ends_with(suffix) &&
         name[name.size() - suffix.size() - 1] == '.';
}

bool is_open(const Token& t) { return t.is_op("(") || t.is_op("[") || t.is_op("{"); }
bool is_close(const Token& t) { return t.is_op(")") || t.is_op("]") || t.is_op("}"); }

std::size_t matching_close(const Tokens& t, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < t.size(); ++i) {
    if (is_open(t[i])) ++depth;
    if (is_close(t[i]) && --depth == 0) return i;
  }
  return t.size();
}

// Top-level comma-separated argument spans between `open` and `close`.
std::vector<Span> split_args(const Tokens& t, std::size_t open, std::size_t close) {
  std::vector<Span> args;
  int depth = 0;
  std::size_t start = open + 1;
  for (std::size_t i = open + 1; i < close; ++i) {
    if (is_open(t[i])) ++depth;
    if (is_close(t[i])) --depth;
    if (depth == 0 && t[i].is_op(",")) {
      args.push_back({start, i});
      start = i + 1;
    }
  }
  if (start < close) args.push_back({start, close});
  return args;
}

bool is_keyword_arg(const Tokens& t, Span a, std::string_view name) {
  return a.size() >= 2 && t[a.begin].is_name(name) && t[a.begin + 1].is_op("=");
}

const Span* find_keyword(const Tokens& t, const std::vector<Span>& args, std::string_view name) {
  for (const auto& a : args) {
    if (is_keyword_arg(t, a, name)) return &a;
  }
  return nullptr;
}

bool is_plain_string(const Token& t) { return t.kind == TokenKind::String && !t.fstring; }

// A position where a literal ends an expression: end of line or a delimiter.
bool terminates_literal(const Tokens& t, std::size_t i) {
  return i >= t.size() || t[i].is_op(",") || t[i].is_op(")") || t[i].is_op("]") ||
         t[i].is_op("}") || t[i].is_op(";") || t[i].is_op(":");
}

class RuleRunner {
 public:
  RuleRunner(std::span<const LogicalLine> logical, std::span<const std::string_view> lines)
      : logical_(logical), lines_(lines) {
    collect_imports();
  }

  std::vector<Finding> run() {
    for (std::size_t idx = 0; idx < logical_.size(); ++idx) {
      const LogicalLine& ll = logical_[idx];
      for (const Call& call : find_calls(ll.tokens)) {
        check_eval(ll, call);
        check_yaml(ll, call);
        check_shell(ll, call);
        check_subprocess(ll, call);
        check_weak_hash(ll, call);
        check_weak_cipher(ll, call);
      }
      check_sql(ll);
      check_password(ll);
      check_except(idx);
      track_sql_assignments(ll);
    }
    return std::move(findings_);
  }

 private:
  void collect_imports() {
    for (const auto& ll : logical_) {
      const Tokens& t = ll.tokens;
      if (t.empty()) continue;
      if (t[0].is_name("import")) {
        // import a.b as c, d
        std::size_t i = 1;
        while (i < t.size()) {
          std::string dotted;
          while (i < t.size() && (t[i].kind == TokenKind::Name || t[i].is_op(".")) &&
                 !t[i].is_name("as")) {
            dotted += t[i].text;
            ++i;
          }
          if (i + 1 < t.size() && t[i].is_name("as") && t[i + 1].kind == TokenKind::Name) {
            aliases_[t[i + 1].text] = dotted;
            i += 2;
          }
          while (i < t.size() && !t[i].is_op(",")) ++i;
          ++i;
        }
      } else if (t[0].is_name("from")) {
        std::size_t i = 1;
        std::string module;
        while (i < t.size() && !t[i].is_name("import")) module += t[i++].text;
        while (!module.empty() && module.front() == '.') module.erase(module.begin());
        ++i;
        while (i < t.size()) {
          if (t[i].kind == TokenKind::Name) {
            std::string name = t[i].text;
            std::string local = name;
            if (i + 2 < t.size() && t[i + 1].is_name("as") && t[i + 2].kind == TokenKind::Name) {
              local = t[i + 2].text;
              i += 2;
            }
            aliases_[local] = module.empty() ? name : module + "." + name;
          }
          ++i;
        }
      }
    }
  }

  std::string resolve(const std::string& dotted) const {
    const auto dot = dotted.find('.');
    const std::string head = dotted.substr(0, dot);
    auto it = aliases_.find(head);
    if (it == aliases_.end()) return dotted;
    return dot == std::string::npos ? it->second : it->second + dotted.substr(dot);
  }

  std::vector<Call> find_calls(const Tokens& t) const {
    std::vector<Call> calls;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i].kind != TokenKind::Name) continue;
      if (i > 0 && (t[i - 1].is_op(".") || t[i - 1].is_name("def") || t[i - 1].is_name("class"))) {
        continue;
      }
      std::string dotted = t[i].text;
      std::size_t j = i + 1;
      while (j + 1 < t.size() && t[j].is_op(".") && t[j + 1].kind == TokenKind::Name) {
        dotted += "." + t[j + 1].text;
        j += 2;
      }
      if (j < t.size() && t[j].is_op("(")) {
        calls.push_back(Call{resolve(dotted), i, j, matching_close(t, j)});
      }
    }
    return calls;
  }

  void emit(std::string_view rule_id, int line_start, int line_end, std::string message) {
    const int total = static_cast<int>(lines_.size());
    if (total == 0) return;
    line_start = std::clamp(line_start, 1, total);
    line_end = std::clamp(line_end, line_start, total);
    const RuleDescriptor& desc = rule(rule_id);
    Finding f;
    f.rule_id = desc.rule_id;
    f.cwe_id = desc.cwe_id;
    f.severity = desc.default_severity;
    f.confidence = desc.default_confidence;
    f.line_start = line_start;
    f.line_end = line_end;
    f.message = std::move(message);
    for (int ln = line_start; ln <= line_end; ++ln) {
      if (ln > line_start) f.snippet += '\n';
      f.snippet += lines_[static_cast<std::size_t>(ln - 1)];
    }
    findings_.push_back(std::move(f));
  }

  void emit_call(std::string_view rule_id, const LogicalLine& ll, const Call& call,
                 std::string message) {
    const Tokens& t = ll.tokens;
    const int end = call.close < t.size() ? t[call.close].end_line : ll.last_line;
    emit(rule_id, t[call.name_begin].line, end, std::move(message));
  }

  // --- CWE-20 -------------------------------------------------------------

  void check_eval(const LogicalLine& ll, const Call& call) {
    static const std::set<std::string> kNames = {"eval", "exec", "builtins.eval", "builtins.exec"};
    if (!kNames.contains(call.resolved)) return;
    const Tokens& t = ll.tokens;
    const auto args = split_args(t, call.open, call.close);
    if (args.empty()) return;
    const Span first = args.front();
    if (first.size() == 1 && is_plain_string(t[first.begin])) return;
    emit_call("SG-20-EVAL", ll, call,
              "Use of " + call.resolved + "() on a non-literal argument; untrusted input may be executed.");
  }

  void check_yaml(const LogicalLine& ll, const Call& call) {
    const bool unsafe_variant =
        call.resolved == "yaml.unsafe_load" || call.resolved == "yaml.unsafe_load_all";
    if (!unsafe_variant && call.resolved != "yaml.load" && call.resolved != "yaml.load_all") return;
    if (!unsafe_variant) {
      const Tokens& t = ll.tokens;
      const auto args = split_args(t, call.open, call.close);
      const Span* loader = find_keyword(t, args, "Loader");
      std::optional<Span> candidate;
      if (loader) candidate = Span{loader->begin + 2, loader->end};
      else if (args.size() >= 2) candidate = args[1];
      if (candidate) {
        for (std::size_t i = candidate->begin; i < candidate->end; ++i) {
          if (t[i].is_name("SafeLoader") || t[i].is_name("CSafeLoader")) return;
        }
      }
    }
    emit_call("SG-20-YAML", ll, call,
              "Unsafe YAML load via " + call.resolved +
                  "(); arbitrary objects can be constructed. Use yaml.safe_load().");
  }

  // --- CWE-78 -------------------------------------------------------------

  void check_shell(const LogicalLine& ll, const Call& call) {
    static const std::set<std::string> kShell = {
        "os.system",          "os.popen",          "os.popen2",
        "os.popen3",          "os.popen4",         "popen2.popen2",
        "popen2.popen3",      "popen2.popen4",     "popen2.Popen3",
        "popen2.Popen4",      "commands.getoutput", "commands.getstatusoutput",
        "subprocess.getoutput", "subprocess.getstatusoutput"};
    if (!kShell.contains(call.resolved)) return;
    emit_call("SG-78-OS", ll, call,
              "Process started with a shell via " + call.resolved + "(); possible command injection.");
  }

  void check_subprocess(const LogicalLine& ll, const Call& call) {
    static const std::set<std::string> kSpawn = {"subprocess.Popen", "subprocess.call",
                                                 "subprocess.check_call", "subprocess.check_output",
                                                 "subprocess.run"};
    if (!kSpawn.contains(call.resolved)) return;
    const Tokens& t = ll.tokens;
    const auto args = split_args(t, call.open, call.close);
    const Span* shell = find_keyword(t, args, "shell");
    if (!shell) return;
    const Span value{shell->begin + 2, shell->end};
    if (value.empty()) return;
    if (value.size() == 1) {
      const Token& v = t[value.begin];
      if (v.is_name("False") || v.is_name("None") || v.is(TokenKind::Number, "0") ||
          (v.kind == TokenKind::String && v.text.empty())) {
        return;
      }
    }
    emit_call("SG-78-SUBPROCESS", ll, call,
              call.resolved + "() called with shell enabled; possible command injection.");
  }

  // --- CWE-327 ------------------------------------------------------------

  static bool used_for_security_disabled(const Tokens& t, const std::vector<Span>& args) {
    const Span* kw = find_keyword(t, args, "usedforsecurity");
    return kw && kw->size() == 3 && t[kw->begin + 2].is_name("False");
  }

  void check_weak_hash(const LogicalLine& ll, const Call& call) {
    static constexpr std::array<std::string_view, 7> kSuffixes = {
        "MD5.new", "MD4.new", "MD2.new", "SHA.new", "SHA1.new", "hashes.MD5", "hashes.SHA1"};
    const Tokens& t = ll.tokens;
    const auto args = split_args(t, call.open, call.close);
    bool weak = call.resolved == "hashlib.md5" || call.resolved == "hashlib.sha1";
    if (call.resolved == "hashlib.new" && !args.empty() && args[0].size() == 1 &&
        t[args[0].begin].kind == TokenKind::String) {
      static const std::set<std::string> kAlgos = {"md5", "sha1", "md4", "md2", "sha"};
      weak = kAlgos.contains(lower(t[args[0].begin].text));
    }
    for (auto suffix : kSuffixes) weak = weak || ends_with_component(call.resolved, suffix);
    if (!weak || used_for_security_disabled(t, args)) return;
    emit_call("SG-327-HASH", ll, call,
              "Weak hash algorithm via " + call.resolved + "(); use SHA-256 or stronger.");
  }

  void check_weak_cipher(const LogicalLine& ll, const Call& call) {
    static constexpr std::array<std::string_view, 10> kSuffixes = {
        "DES.new",          "DES3.new",           "ARC4.new",
        "ARC2.new",         "Blowfish.new",       "XOR.new",
        "algorithms.TripleDES", "algorithms.ARC4", "algorithms.Blowfish",
        "algorithms.IDEA"};
    for (auto suffix : kSuffixes) {
      if (ends_with_component(call.resolved, suffix)) {
        emit_call("SG-327-CIPHER", ll, call,
                  "Broken or risky cipher via " + call.resolved + "(); use AES-GCM or ChaCha20-Poly1305.");
        return;
      }
    }
  }

  // --- CWE-89 -------------------------------------------------------------

  static bool looks_like_sql(const std::string& text) {
    static const std::regex kSql(
        R"((select\s[\s\S]*from\s|delete\s+from\s|insert\s+into\s[\s\S]*values|update\s[\s\S]*set\s))",
        std::regex::icase | std::regex::ECMAScript);
    return std::regex_search(text, kSql);
  }

  // True when the expression in `span` builds SQL text from variables.
  bool builds_sql(const Tokens& t, Span span) const {
    if (span.empty()) return false;
    if (span.size() == 1 && t[span.begin].kind == TokenKind::Name &&
        sql_built_vars_.contains(t[span.begin].text)) {
      return true;
    }
    bool sql_source = false;
    bool interpolated = false;
    bool combined = false;
    int depth = 0;
    for (std::size_t i = span.begin; i < span.end; ++i) {
      const Token& tok = t[i];
      if (is_open(tok)) ++depth;
      if (is_close(tok)) --depth;
      if (tok.kind == TokenKind::String && !tok.bytes && looks_like_sql(tok.text)) {
        sql_source = true;
        if (tok.fstring && tok.text.find('{') != std::string::npos) interpolated = true;
      }
      if (tok.kind == TokenKind::Name && i == span.begin && sql_literal_vars_.contains(tok.text)) {
        sql_source = true;
      }
      if (depth == 0 && (tok.is_op("+") || tok.is_op("%"))) combined = true;
      if (tok.is_op(".") && i + 1 < span.end && t[i + 1].is_name("format")) combined = true;
    }
    return sql_source && (interpolated || combined);
  }

  void check_sql(const LogicalLine& ll) {
    static const std::set<std::string> kExec = {"execute", "executemany", "executescript"};
    const Tokens& t = ll.tokens;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
      if (!t[i - 1].is_op(".") || t[i].kind != TokenKind::Name || !kExec.contains(t[i].text) ||
          !t[i + 1].is_op("(")) {
        continue;
      }
      const std::size_t close = matching_close(t, i + 1);
      const auto args = split_args(t, i + 1, close);
      if (args.empty() || !builds_sql(t, args.front())) continue;
      const int end = close < t.size() ? t[close].end_line : ll.last_line;
      emit("SG-89", t[i].line, end,
           "SQL query passed to " + t[i].text +
               "() is built from variables; use a parameterized query.");
    }
  }

  void track_sql_assignments(const LogicalLine& ll) {
    const Tokens& t = ll.tokens;
    if (t.size() < 3 || t[0].kind != TokenKind::Name) return;
    const std::string& name = t[0].text;
    const Span rhs{2, t.size()};
    if (t[1].is_op("=")) {
      sql_built_vars_.erase(name);
      sql_literal_vars_.erase(name);
      if (builds_sql(t, rhs)) sql_built_vars_.insert(name);
      else if (rhs.size() == 1 && is_plain_string(t[2]) && looks_like_sql(t[2].text)) {
        sql_literal_vars_.insert(name);
      }
    } else if ((t[1].is_op("+=") || t[1].is_op("%=")) &&
               (sql_literal_vars_.contains(name) || sql_built_vars_.contains(name))) {
      const bool literal_only = rhs.size() == 1 && is_plain_string(t[2]);
      if (!literal_only) sql_built_vars_.insert(name);
    }
  }

  // --- CWE-259 ------------------------------------------------------------

  static bool credential_name(std::string_view name) {
    static const std::regex kCred(R"(pass(word)?|pwd|secret)", std::regex::icase);
    return std::regex_search(name.begin(), name.end(), kCred);
  }

  static bool credential_literal(const Token& t) {
    return t.kind == TokenKind::String && !t.fstring && !t.bytes;
  }

  void check_password(const LogicalLine& ll) {
    const Tokens& t = ll.tokens;
    std::set<int> flagged_lines;
    auto flag = [&](const Token& name_tok, const Token& lit) {
      if (!flagged_lines.insert(name_tok.line).second) return;
      emit("SG-259", name_tok.line, lit.end_line,
           "Possible hard-coded credential assigned to '" + name_tok.text + "'.");
    };
    for (std::size_t i = 0; i < t.size(); ++i) {
      const Token& tok = t[i];
      if (tok.kind == TokenKind::Name && credential_name(tok.text)) {
        // name = "literal"   (assignment, keyword argument, parameter default)
        if (i + 2 < t.size() && (t[i + 1].is_op("=") || t[i + 1].is_op("==") || t[i + 1].is_op("!=")) &&
            credential_literal(t[i + 2]) && terminates_literal(t, i + 3)) {
          flag(tok, t[i + 2]);
          continue;
        }
        // name: annotation = "literal"
        if (i == 0 && i + 1 < t.size() && t[i + 1].is_op(":")) {
          for (std::size_t j = i + 2; j + 1 < t.size() && j < i + 8; ++j) {
            if (t[j].is_op("=")) {
              if (credential_literal(t[j + 1]) && terminates_literal(t, j + 2)) flag(tok, t[j + 1]);
              break;
            }
          }
        }
      }
      // "literal" == name
      if (credential_literal(tok) && i + 2 < t.size() && (t[i + 1].is_op("==") || t[i + 1].is_op("!=")) &&
          t[i + 2].kind == TokenKind::Name && credential_name(t[i + 2].text)) {
        flag(t[i + 2], tok);
      }
      // obj["password"] = "literal"
      if (tok.is_op("[") && i + 4 < t.size() && credential_literal(t[i + 1]) &&
          credential_name(t[i + 1].text) && t[i + 2].is_op("]") && t[i + 3].is_op("=") &&
          credential_literal(t[i + 4]) && terminates_literal(t, i + 5)) {
        flag(t[i + 1], t[i + 4]);
      }
    }
  }

  // --- CWE-703 ------------------------------------------------------------

  static bool is_silent_statement(const Tokens& t, std::size_t begin, std::size_t end) {
    return end == begin + 1 && (t[begin].is_name("pass") || t[begin].is_name("continue"));
  }

  void check_except(std::size_t idx) {
    const LogicalLine& header = logical_[idx];
    const Tokens& t = header.tokens;
    if (t.empty() || !t[0].is_name("except")) return;
    std::size_t colon = t.size();
    int depth = 0;
    for (std::size_t i = 1; i < t.size(); ++i) {
      if (is_open(t[i])) ++depth;
      if (is_close(t[i])) --depth;
      if (depth == 0 && t[i].is_op(":")) {
        colon = i;
        break;
      }
    }
    if (colon == t.size()) return;
    const bool bare = colon == 1;

    bool silent = false;
    int body_last = header.last_line;
    if (colon + 1 < t.size()) {
      std::size_t end = t.size();
      if (t.back().is_op(";")) --end;
      silent = is_silent_statement(t, colon + 1, end);
    } else if (idx + 1 < logical_.size() && logical_[idx + 1].indent > header.indent) {
      const int body_indent = logical_[idx + 1].indent;
      std::size_t statements = 0;
      bool nested = false;
      std::size_t k = idx + 1;
      for (; k < logical_.size() && logical_[k].indent > header.indent; ++k) {
        if (logical_[k].indent == body_indent) ++statements;
        else nested = true;
      }
      const LogicalLine& first = logical_[idx + 1];
      silent = statements == 1 && !nested &&
               is_silent_statement(first.tokens, 0, first.tokens.size());
      if (silent) body_last = first.last_line;
    }

    if (silent) {
      emit("SG-703", header.first_line, body_last,
           std::string(bare ? "Bare except" : "Exception handler") +
               " silently discards the error (pass/continue).");
    } else if (bare) {
      emit("SG-703", header.first_line, header.first_line,
           "Bare except clause catches every exception, including SystemExit and KeyboardInterrupt.");
    }
  }

  std::span<const LogicalLine> logical_;
  std::span<const std::string_view> lines_;
  std::map<std::string, std::string> aliases_;
  std::set<std::string> sql_built_vars_;
  std::set<std::string> sql_literal_vars_;
  std::vector<Finding> findings_;
};

}  // namespace

const std::vector<RuleDescriptor>& rule_registry() {
  static const std::vector<RuleDescriptor> kRules = {
      {"SG-20-EVAL", 20, "Dynamic code evaluation", Level::Medium, Level::High,
       "eval() or exec() applied to a non-literal argument."},
      {"SG-20-YAML", 20, "Unsafe YAML deserialization", Level::Medium, Level::High,
       "yaml.load without SafeLoader/CSafeLoader, or yaml.unsafe_load."},
      {"SG-78-OS", 78, "Shell command execution", Level::High, Level::High,
       "os.system, os.popen and related calls that always run through a shell."},
      {"SG-78-SUBPROCESS", 78, "Subprocess with shell enabled", Level::High, Level::High,
       "subprocess call with a truthy shell= argument."},
      {"SG-89", 89, "SQL built from variables", Level::Medium, Level::Medium,
       "execute() argument built by concatenation, %-formatting, .format or f-string interpolation."},
      {"SG-259", 259, "Hard-coded credential", Level::Low, Level::Medium,
       "String literal bound to an identifier matching pass(word)?|pwd|secret."},
      {"SG-327-CIPHER", 327, "Broken or risky cipher", Level::High, Level::High,
       "DES, 3DES, RC4, RC2, Blowfish or IDEA cipher construction."},
      {"SG-327-HASH", 327, "Weak hash algorithm", Level::High, Level::High,
       "MD5, MD4, MD2 or SHA-1 hash construction without usedforsecurity=False."},
      {"SG-703", 703, "Swallowed or overly broad exception", Level::Low, Level::High,
       "Bare except clause, or an except clause whose body is only pass/continue."},
  };
  return kRules;
}

const RuleDescriptor& rule(std::string_view rule_id) {
  for (const auto& r : rule_registry()) {
    if (r.rule_id == rule_id) return r;
  }
  throw std::out_of_range("unknown rule id: " + std::string(rule_id));
}

std::vector<Finding> run_rules(std::span<const LogicalLine> logical,
                               std::span<const std::string_view> lines) {
  return RuleRunner(logical, lines).run();
}

}  // namespace sgforge::analysis
