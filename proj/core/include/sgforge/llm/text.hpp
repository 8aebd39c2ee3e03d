#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace sgforge::llm {

// Concatenation of all fenced (```) code blocks, joined by newlines. Without
// fences the whole content is returned trimmed. An unclosed fence runs to the
// end of the content.
std::string extract_code(std::string_view content);

// ceil(code points / 4).
std::int64_t estimate_tokens(std::string_view text);

}  // namespace sgforge::llm
