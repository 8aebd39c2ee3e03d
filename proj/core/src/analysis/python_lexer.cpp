#include "sgforge/analysis/python_lexer.hpp"

#include <array>
#include <cctype>

namespace sgforge::analysis {
namespace {

bool is_name_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_name_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

bool is_string_prefix(std::string_view p) {
  if (p.empty() || p.size() > 2) return false;
  bool seen_b = false, seen_f = false, seen_r = false, seen_u = false;
  for (char ch : p) {
    switch (std::tolower(static_cast<unsigned char>(ch))) {
      case 'b': if (seen_b || seen_f || seen_u) return false; seen_b = true; break;
      case 'f': if (seen_f || seen_b || seen_u) return false; seen_f = true; break;
      case 'r': if (seen_r || seen_u) return false; seen_r = true; break;
      case 'u': if (p.size() != 1) return false; seen_u = true; break;
      default: return false;
    }
  }
  return true;
}

constexpr std::array<std::string_view, 25> kMultiOps = {
    "**=", "//=", ">>=", "<<=", "...", "==", "!=", "<=", ">=", "->", ":=", "+=", "-=",
    "*=",  "/=",  "%=",  "&=",  "|=",  "^=", "@=", "**", "//", "<<", ">>", "<>"};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<LogicalLine> run() {
    while (pos_ < src_.size()) {
      unsigned char c = static_cast<unsigned char>(src_[pos_]);
      if (c == '\n') {
        advance();
        if (depth_ == 0) end_logical_line();
      } else if (c == '\\' && peek(1) == '\n') {
        advance();
        advance();
      } else if (c == '\\' && peek(1) == '\r' && peek(2) == '\n') {
        advance();
        advance();
        advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\\') {
        advance();
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (is_name_start(c)) {
        lex_name_or_string();
      } else if (std::isdigit(c) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
        lex_number();
      } else if (c == '"' || c == '\'') {
        lex_string("", line_, col_);
      } else {
        lex_op();
      }
    }
    end_logical_line();
    return std::move(lines_);
  }

 private:
  char peek(std::size_t ahead) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 0;
    } else if (src_[pos_] == '\t') {
      col_ = (col_ / 8 + 1) * 8;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void push(Token tok) {
    if (current_.tokens.empty()) {
      current_.first_line = tok.line;
      current_.indent = tok.column;
    }
    current_.last_line = tok.end_line;
    current_.tokens.push_back(std::move(tok));
  }

  void end_logical_line() {
    if (!current_.tokens.empty()) lines_.push_back(std::move(current_));
    current_ = LogicalLine{};
    depth_ = 0;
  }

  void lex_name_or_string() {
    const std::size_t start = pos_;
    const int line = line_, col = col_;
    while (pos_ < src_.size() && is_name_char(static_cast<unsigned char>(src_[pos_]))) advance();
    std::string_view word = src_.substr(start, pos_ - start);
    if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'') && is_string_prefix(word)) {
      lex_string(word, line, col);
      return;
    }
    push(Token{TokenKind::Name, std::string(word), line, line, col});
  }

  void lex_number() {
    const std::size_t start = pos_;
    const int line = line_, col = col_;
    while (pos_ < src_.size()) {
      char ch = src_[pos_];
      if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.') {
        const bool exponent = (ch == 'e' || ch == 'E');
        advance();
        if (exponent && (peek(0) == '+' || peek(0) == '-')) advance();
      } else {
        break;
      }
    }
    push(Token{TokenKind::Number, std::string(src_.substr(start, pos_ - start)), line, line, col});
  }

  void lex_string(std::string_view prefix, int line, int col) {
    bool fstr = false, bytes = false;
    for (char ch : prefix) {
      const int lower = std::tolower(static_cast<unsigned char>(ch));
      fstr = fstr || lower == 'f';
      bytes = bytes || lower == 'b';
    }
    const char quote = src_[pos_];
    const bool triple = peek(1) == quote && peek(2) == quote;
    const std::size_t qlen = triple ? 3 : 1;
    for (std::size_t i = 0; i < qlen; ++i) advance();
    const std::size_t body_start = pos_;
    std::size_t body_end = src_.size();
    while (pos_ < src_.size()) {
      char ch = src_[pos_];
      if (ch == '\\' && pos_ + 1 < src_.size()) {
        advance();
        advance();
        continue;
      }
      if (!triple && ch == '\n') {  // unterminated single-line literal
        body_end = pos_;
        break;
      }
      if (ch == quote && (!triple || (peek(1) == quote && peek(2) == quote))) {
        body_end = pos_;
        for (std::size_t i = 0; i < qlen; ++i) advance();
        break;
      }
      advance();
    }
    Token tok{TokenKind::String, std::string(src_.substr(body_start, body_end - body_start)), line,
              line_, col};
    // A literal that ends on a newline character belongs to the previous line.
    if (tok.end_line > line && pos_ > 0 && src_[pos_ - 1] == '\n') tok.end_line = line_ - 1;
    tok.fstring = fstr;
    tok.bytes = bytes;
    push(std::move(tok));
  }

  void lex_op() {
    const int line = line_, col = col_;
    for (std::string_view op : kMultiOps) {
      if (src_.substr(pos_, op.size()) == op) {
        for (std::size_t i = 0; i < op.size(); ++i) advance();
        push(Token{TokenKind::Op, std::string(op), line, line, col});
        return;
      }
    }
    char ch = src_[pos_];
    if (ch == '(' || ch == '[' || ch == '{') ++depth_;
    if ((ch == ')' || ch == ']' || ch == '}') && depth_ > 0) --depth_;
    advance();
    push(Token{TokenKind::Op, std::string(1, ch), line, line, col});
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 0;
  int depth_ = 0;
  LogicalLine current_;
  std::vector<LogicalLine> lines_;
};

}  // namespace

std::vector<LogicalLine> tokenize(std::string_view source) { return Lexer(source).run(); }

std::vector<std::string_view> split_lines(std::string_view source) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < source.size()) {
    std::size_t nl = source.find('\n', start);
    if (nl == std::string_view::npos) {
      out.push_back(source.substr(start));
      break;
    }
    out.push_back(source.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

bool is_valid_utf8(std::string_view text) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t extra;
    char32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= n) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong encodings, surrogates, out-of-range code points.
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000) ||
        cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += extra + 1;
  }
  return true;
}

}  // namespace sgforge::analysis
