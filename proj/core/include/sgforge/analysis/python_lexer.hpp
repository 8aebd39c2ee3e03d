#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sgforge::analysis {

enum class TokenKind { Name, Number, String, Op };

// One lexical token. String literals carry their decoded body in `text`
// (quotes and prefix stripped, escapes left as written), so rules can look at
// literal contents without ever matching code patterns inside them.
struct Token {
  TokenKind kind = TokenKind::Op;
  std::string text;
  int line = 1;      // 1-based line of the first character
  int end_line = 1;  // 1-based line of the last character
  int column = 0;
  bool fstring = false;
  bool bytes = false;

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_op(std::string_view t) const { return is(TokenKind::Op, t); }
  bool is_name(std::string_view t) const { return is(TokenKind::Name, t); }
};

// A logical line: tokens joined across bracket nesting and backslash
// continuations. Comments are dropped by the lexer.
struct LogicalLine {
  std::vector<Token> tokens;
  int first_line = 1;
  int last_line = 1;
  int indent = 0;  // column of the first token, tabs expanded to multiples of 8
};

// Tokenizes Python-like source. Never throws: unterminated literals run to
// the end of the line (single-quoted) or the end of input (triple-quoted).
std::vector<LogicalLine> tokenize(std::string_view source);

// Physical lines of `source` without their '\n' terminators. A trailing
// newline does not start an extra line; "" has zero lines.
std::vector<std::string_view> split_lines(std::string_view source);

bool is_valid_utf8(std::string_view text);

}  // namespace sgforge::analysis
