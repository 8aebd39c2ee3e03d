#include "sgforge/report/html.hpp"

#include <string>

namespace sgforge::report {
namespace {

constexpr std::string_view kStyle = R"(body{font-family:system-ui,sans-serif;margin:2rem;color:#222}
h1{font-size:1.4rem}table{border-collapse:collapse;width:100%}
td,th{border:1px solid #ddd;padding:2px 6px;text-align:left;vertical-align:top}
pre{margin:0;white-space:pre-wrap}.keep{background:#fff}.delete{background:#fde8e8}.insert{background:#e6f6e6}
.tabs input{display:none}.tabs label{display:inline-block;padding:4px 12px;border:1px solid #ccc;cursor:pointer}
.tabs .panel{display:none;border:1px solid #ccc;padding:8px}
#tab-original:checked~#panel-original,#tab-secured:checked~#panel-secured{display:block}
.summary span{font-weight:bold;margin-right:1rem})";

void findings_table(std::string& out, const std::vector<analysis::Finding>& findings) {
  if (findings.empty()) {
    out += "<p>No issues found.</p>\n";
    return;
  }
  out += "<table><tr><th>Line</th><th>Rule</th><th>CWE</th><th>Severity</th><th>Confidence</th><th>Issue</th></tr>\n";
  for (const auto& f : findings) {
    out += "<tr><td>" + std::to_string(f.line_start);
    if (f.line_end != f.line_start) out += "-" + std::to_string(f.line_end);
    out += "</td><td>" + html_escape(f.rule_id) + "</td><td>CWE-" + std::to_string(f.cwe_id) + "</td><td>" +
           std::string(analysis::to_string(f.severity)) + "</td><td>" + std::string(analysis::to_string(f.confidence)) +
           "</td><td>" + html_escape(f.message) + "<pre>" + html_escape(f.snippet) + "</pre></td></tr>\n";
  }
  out += "</table>\n";
}

}  // namespace

std::string html_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_html(const SecurityReport& r) {
  std::string out;
  out += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>Security report " +
         html_escape(r.report_id) + "</title>\n<style>\n";
  out += kStyle;
  out += "\n</style>\n</head>\n<body>\n<h1>Security report " + html_escape(r.report_id) + "</h1>\n";
  out += "<p>Created " + html_escape(r.created_at) + "</p>\n";

  const auto& s = r.summary;
  out += "<section id=\"summary\" class=\"summary\"><h2>Summary</h2>\n";
  out += "<span class=\"identified\">Identified: " + std::to_string(s.identified) + "</span>";
  out += "<span class=\"fixed\">Fixed: " + std::to_string(s.fixed) + "</span>";
  out += "<span class=\"remaining\">Remaining: " + std::to_string(s.remaining) + "</span>";
  out += "<span class=\"introduced\">Introduced: " + std::to_string(s.introduced) + "</span>\n";
  if (s.identified == 0 && s.remaining == 0) out += "<p>No security issues were identified.</p>\n";
  out += "</section>\n";

  out += "<section id=\"confidence\"><h2>Issue confidence (original code)</h2>\n<table>";
  for (const char* level : {"LOW", "MEDIUM", "HIGH"}) {
    const auto it = r.confidence_counts.find(level);
    out += "<tr><th>" + std::string(level) + "</th><td>" +
           std::to_string(it == r.confidence_counts.end() ? 0 : it->second) + "</td></tr>";
  }
  out += "</table>\n<script id=\"confidence-data\" type=\"application/json\">";
  std::string data = nlohmann::json(r.confidence_counts).dump();
  for (std::size_t pos = 0; (pos = data.find('<', pos)) != std::string::npos;) data.replace(pos, 1, "\\u003c");
  out += data + "</script>\n</section>\n";

  out += "<section id=\"issues\" class=\"tabs\"><h2>Issues</h2>\n";
  out += "<input type=\"radio\" name=\"tabs\" id=\"tab-original\" checked>"
         "<label for=\"tab-original\">Original code (" + std::to_string(r.original_findings.size()) + ")</label>";
  out += "<input type=\"radio\" name=\"tabs\" id=\"tab-secured\">"
         "<label for=\"tab-secured\">Secured code (" + std::to_string(r.secured_findings.size()) + ")</label>\n";
  out += "<div class=\"panel\" id=\"panel-original\">\n";
  findings_table(out, r.original_findings);
  out += "</div>\n<div class=\"panel\" id=\"panel-secured\">\n";
  findings_table(out, r.secured_findings);
  out += "</div>\n</section>\n";

  out += "<section id=\"diff\"><h2>Line-by-line comparison</h2>\n<table>\n"
         "<tr><th>Original</th><th>Secured</th><th>Code</th></tr>\n";
  int left = 0, right = 0;
  for (const auto& hunk : r.diff.hunks) {
    const std::string cls(to_string(hunk.op));
    for (const auto& line : hunk.lines) {
      const bool in_left = hunk.op != DiffOp::Insert;
      const bool in_right = hunk.op != DiffOp::Delete;
      const char* mark = hunk.op == DiffOp::Keep ? "  " : hunk.op == DiffOp::Delete ? "- " : "+ ";
      out += "<tr class=\"" + cls + "\"><td>" + (in_left ? std::to_string(++left) : "") + "</td><td>" +
             (in_right ? std::to_string(++right) : "") + "</td><td><pre>" + mark + html_escape(line) +
             "</pre></td></tr>\n";
    }
  }
  out += "</table>\n</section>\n</body>\n</html>\n";
  return out;
}

}  // namespace sgforge::report
