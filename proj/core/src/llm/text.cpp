#include "sgforge/llm/text.hpp"

#include <vector>

namespace sgforge::llm {
namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool is_fence(std::string_view line) {
  const auto b = line.find_first_not_of(" \t");
  return b != std::string_view::npos && line.substr(b).starts_with("```");
}

}  // namespace

std::string extract_code(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= content.size()) {
    const auto nl = content.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(content.substr(start));
      break;
    }
    lines.push_back(content.substr(start, nl - start));
    start = nl + 1;
  }

  std::vector<std::string> blocks;
  bool inside = false;
  bool any_fence = false;
  std::string current;
  bool current_empty = true;
  for (auto line : lines) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (is_fence(line)) {
      any_fence = true;
      if (inside) {
        blocks.push_back(std::move(current));
        current.clear();
        current_empty = true;
      }
      inside = !inside;
      continue;
    }
    if (inside) {
      if (!current_empty) current += '\n';
      current += line;
      current_empty = false;
    }
  }
  if (inside && !current_empty) {
    // Unterminated fence: the reply was cut off, so drop the trailing blank lines.
    while (!current.empty() && current.back() == '\n') current.pop_back();
    blocks.push_back(std::move(current));
  }
  if (!any_fence) return std::string(trim(content));

  std::string out;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (i > 0) out += '\n';
    out += blocks[i];
  }
  return out;
}

std::int64_t estimate_tokens(std::string_view text) {
  std::int64_t code_points = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++code_points;
  }
  return (code_points + 3) / 4;
}

}  // namespace sgforge::llm
