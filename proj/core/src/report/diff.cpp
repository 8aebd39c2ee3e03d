#include "sgforge/report/diff.hpp"

#include <cstdint>
#include <stdexcept>

namespace sgforge::report {
namespace {

void push(LineDiff& diff, DiffOp op, const std::string& line) {
  if (diff.hunks.empty() || diff.hunks.back().op != op) diff.hunks.push_back({op, {}});
  diff.hunks.back().lines.push_back(line);
}

}  // namespace

std::string_view to_string(DiffOp op) {
  switch (op) {
    case DiffOp::Keep: return "keep";
    case DiffOp::Delete: return "delete";
    case DiffOp::Insert: return "insert";
  }
  return "keep";
}

DiffOp parse_diff_op(std::string_view text) {
  if (text == "keep") return DiffOp::Keep;
  if (text == "delete") return DiffOp::Delete;
  if (text == "insert") return DiffOp::Insert;
  throw std::invalid_argument("unknown diff op '" + std::string(text) + "'");
}

std::vector<std::string> split_diff_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  for (;;) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(start));
      return lines;
    }
    lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
}

std::string join_diff_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

LineDiff diff_lines(std::string_view original, std::string_view secured) {
  const auto a = split_diff_lines(original);
  const auto b = split_diff_lines(secured);

  std::size_t prefix = 0;
  while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
  std::size_t suffix = 0;
  while (suffix < a.size() - prefix && suffix < b.size() - prefix &&
         a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix]) {
    ++suffix;
  }
  const std::size_t n = a.size() - prefix - suffix;
  const std::size_t m = b.size() - prefix - suffix;

  LineDiff diff;
  for (std::size_t i = 0; i < prefix; ++i) push(diff, DiffOp::Keep, a[i]);

  if ((n + 1) * (m + 1) > kMaxDiffCells) {
    for (std::size_t i = 0; i < n; ++i) push(diff, DiffOp::Delete, a[prefix + i]);
    for (std::size_t j = 0; j < m; ++j) push(diff, DiffOp::Insert, b[prefix + j]);
  } else {
    // lcs[i][j] = LCS length of a[prefix+i..] and b[prefix+j..].
    std::vector<std::uint32_t> lcs((n + 1) * (m + 1), 0);
    auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return lcs[i * (m + 1) + j]; };
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t j = m; j-- > 0;) {
        at(i, j) = a[prefix + i] == b[prefix + j] ? at(i + 1, j + 1) + 1 : std::max(at(i + 1, j), at(i, j + 1));
      }
    }
    std::size_t i = 0, j = 0;
    while (i < n || j < m) {
      if (i < n && j < m && a[prefix + i] == b[prefix + j]) {
        push(diff, DiffOp::Keep, a[prefix + i]);
        ++i, ++j;
      } else if (j == m || (i < n && at(i + 1, j) >= at(i, j + 1))) {
        push(diff, DiffOp::Delete, a[prefix + i]);
        ++i;
      } else {
        push(diff, DiffOp::Insert, b[prefix + j]);
        ++j;
      }
    }
  }

  for (std::size_t i = a.size() - suffix; i < a.size(); ++i) push(diff, DiffOp::Keep, a[i]);
  return diff;
}

std::string apply_diff(const LineDiff& diff, std::string_view original) {
  const auto source = split_diff_lines(original);
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (const auto& hunk : diff.hunks) {
    if (hunk.op == DiffOp::Insert) {
      out.insert(out.end(), hunk.lines.begin(), hunk.lines.end());
      continue;
    }
    for (const auto& line : hunk.lines) {
      if (pos >= source.size() || source[pos] != line) {
        throw std::invalid_argument("diff does not match the original at line " + std::to_string(pos + 1));
      }
      if (hunk.op == DiffOp::Keep) out.push_back(line);
      ++pos;
    }
  }
  if (pos != source.size()) throw std::invalid_argument("diff does not consume the whole original");
  return join_diff_lines(out);
}

void to_json(nlohmann::json& j, const DiffHunk& h) {
  j = nlohmann::json{{"op", std::string(to_string(h.op))}, {"lines", h.lines}};
}

void from_json(const nlohmann::json& j, DiffHunk& h) {
  h.op = parse_diff_op(j.at("op").get<std::string>());
  j.at("lines").get_to(h.lines);
}

void to_json(nlohmann::json& j, const LineDiff& d) { j = nlohmann::json{{"hunks", d.hunks}}; }

void from_json(const nlohmann::json& j, LineDiff& d) { j.at("hunks").get_to(d.hunks); }

}  // namespace sgforge::report
