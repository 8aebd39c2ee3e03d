#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace sgforge::report {

enum class DiffOp { Keep, Delete, Insert };

std::string_view to_string(DiffOp op);
DiffOp parse_diff_op(std::string_view text);  // throws std::invalid_argument

struct DiffHunk {
  DiffOp op = DiffOp::Keep;
  std::vector<std::string> lines;

  friend bool operator==(const DiffHunk&, const DiffHunk&) = default;
};

// Whole-line edit script. Adjacent hunks never share an op.
struct LineDiff {
  std::vector<DiffHunk> hunks;

  friend bool operator==(const LineDiff&, const LineDiff&) = default;
};

// Splits on '\n' and keeps the piece after the last newline, so joining the
// result with '\n' restores the input exactly. "" yields {""}.
std::vector<std::string> split_diff_lines(std::string_view text);
std::string join_diff_lines(const std::vector<std::string>& lines);

// Longest-common-subsequence diff. Inputs whose trimmed core exceeds
// kMaxDiffCells table cells degrade to delete-all/insert-all.
inline constexpr std::size_t kMaxDiffCells = std::size_t{1} << 24;
LineDiff diff_lines(std::string_view original, std::string_view secured);

// Replays `diff` over `original`. Throws std::invalid_argument when the keep
// and delete hunks do not match `original`.
std::string apply_diff(const LineDiff& diff, std::string_view original);

void to_json(nlohmann::json& j, const DiffHunk& h);
void from_json(const nlohmann::json& j, DiffHunk& h);
void to_json(nlohmann::json& j, const LineDiff& d);
void from_json(const nlohmann::json& j, LineDiff& d);

}  // namespace sgforge::report
