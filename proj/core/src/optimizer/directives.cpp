#include "sgforge/optimizer/directives.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "sgforge/error.hpp"

namespace sgforge::optimizer {
namespace {

// Templates use {line} for the anchor line.
const std::map<int, std::string>& templates() {
  static const std::map<int, std::string> kTemplates = {
      {20, "Validate the untrusted input used at line {line} and stop evaluating it as code: "
           "use ast.literal_eval instead of eval/exec and yaml.safe_load instead of yaml.load (CWE-20)."},
      {78, "Remove the shell command execution at line {line}: call subprocess with an argument list "
           "and shell=False, and never build commands from external input (CWE-78)."},
      {89, "Replace the SQL statement built from variables at line {line} with a parameterized query "
           "that passes values separately from the SQL text (CWE-89)."},
      {259, "Replace the hard-coded credential at line {line} with a value read from the environment "
            "or a secrets store (CWE-259)."},
      {327, "Replace the broken or weak cryptographic primitive at line {line} with a modern one such as "
            "SHA-256 for hashing or AES-GCM for encryption (CWE-327)."},
      {703, "Handle the exception at line {line} explicitly: catch the specific exception type and log "
            "or recover instead of silently ignoring it (CWE-703)."},
  };
  return kTemplates;
}

std::string fill(std::string text, int line) {
  const auto pos = text.find("{line}");
  if (pos != std::string::npos) text.replace(pos, 6, std::to_string(line));
  return text;
}

}  // namespace

bool has_directive_template(int cwe_id) { return templates().contains(cwe_id); }

std::vector<FixDirective> derive_fix_directives(std::span<const analysis::Finding> findings,
                                                UnknownCwePolicy policy) {
  std::set<std::pair<int, int>> seen;  // (line, cwe)
  std::vector<FixDirective> out;
  for (const auto& f : findings) {
    if (!seen.insert({f.line_start, f.cwe_id}).second) continue;
    const auto it = templates().find(f.cwe_id);
    std::string text;
    if (it != templates().end()) {
      text = fill(it->second, f.line_start);
    } else if (policy == UnknownCwePolicy::Reject) {
      throw UnknownCwe("no directive template for CWE-" + std::to_string(f.cwe_id));
    } else {
      text = "Fix the reported issue at line " + std::to_string(f.line_start) + " (CWE-" +
             std::to_string(f.cwe_id) + ")" + (f.message.empty() ? "." : ": " + f.message);
    }
    out.push_back(FixDirective{f.cwe_id, std::move(text), f.line_start});
  }
  std::sort(out.begin(), out.end(), [](const FixDirective& a, const FixDirective& b) {
    return std::tie(a.anchor_line, a.cwe_id) < std::tie(b.anchor_line, b.cwe_id);
  });
  return out;
}

}  // namespace sgforge::optimizer
