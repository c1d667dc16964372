#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "liffig/ast.hpp"
#include "liffig/errors.hpp"

namespace liffig {

enum class TokenKind {
  ident,
  keyword,
  integer,
  op,          // punctuation and operators, text in Token::text
  annotation,  // {...}; text is the trimmed content
  hole,        // "..."; text is the content with whitespace runs collapsed
  end,
};

struct Token {
  TokenKind kind = TokenKind::end;
  std::string text;
  std::int64_t value = 0;  // integer literals
  SourceSpan span;
  std::size_t offset = 0;  // byte offset of the first character

  bool is_op(std::string_view s) const { return kind == TokenKind::op && text == s; }
  bool is_keyword(std::string_view s) const { return kind == TokenKind::keyword && text == s; }
  bool operator==(const Token& o) const {
    return kind == o.kind && text == o.text && value == o.value;
  }
};

class LexError : public Error {
 public:
  enum class Kind { unterminated_comment, unterminated_string, illegal_character, bad_integer };

  LexError(Kind kind, SourceSpan span, const std::string& what)
      : Error(what), kind_(kind), span_(span) {}
  Kind kind() const noexcept { return kind_; }
  const SourceSpan& span() const noexcept { return span_; }

 private:
  Kind kind_;
  SourceSpan span_;
};

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

inline std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      pending = !out.empty();
    } else {
      if (pending) out += ' ';
      pending = false;
      out += c;
    }
  }
  return out;
}

/// Pull-style tokenizer over a source buffer. Positions can be saved and
/// restored, which the program parser uses to skip raw assertion text.
class Lexer {
 public:
  explicit Lexer(std::string_view source) : src_(source), end_(source.size()) {}

  /// Lexes only `source[begin, end)`; `line`/`column` give the position of `begin`.
  Lexer(std::string_view source, std::size_t begin, std::size_t end, std::size_t line,
        std::size_t column)
      : src_(source), end_(end), pos_(begin), line_(line), line_start_(begin + 1 - column) {}

  std::size_t offset() const { return pos_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return pos_ - line_start_ + 1; }
  std::string_view source() const { return src_; }

  /// Repositions the lexer; `line`/`column` must describe `offset`.
  void restore(std::size_t offset, std::size_t line, std::size_t column) {
    pos_ = offset;
    line_ = line;
    line_start_ = offset + 1 - column;
  }

  Token next() {
    skip_whitespace();
    Token tok;
    tok.offset = pos_;
    tok.span = {line_, column(), 0};
    if (pos_ >= end_) {
      tok.kind = TokenKind::end;
      return tok;
    }
    const char c = src_[pos_];
    if (is_alpha(c)) {
      const std::size_t begin = pos_;
      while (pos_ < end_ && (is_alpha(src_[pos_]) || is_digit(src_[pos_]) || src_[pos_] == '_')) {
        advance();
      }
      tok.text = std::string(src_.substr(begin, pos_ - begin));
      tok.kind = is_reserved(tok.text) ? TokenKind::keyword : TokenKind::ident;
    } else if (is_digit(c)) {
      const std::size_t begin = pos_;
      std::int64_t v = 0;
      bool overflow = false;
      while (pos_ < end_ && is_digit(src_[pos_])) {
        if (__builtin_mul_overflow(v, 10, &v) || __builtin_add_overflow(v, src_[pos_] - '0', &v)) {
          overflow = true;
        }
        advance();
      }
      tok.text = std::string(src_.substr(begin, pos_ - begin));
      if (overflow) {
        tok.span.length = tok.text.size();
        throw LexError(LexError::Kind::bad_integer, tok.span,
                       "integer literal out of range: " + tok.text);
      }
      tok.kind = TokenKind::integer;
      tok.value = v;
    } else if (c == '{') {
      const SourceSpan open = tok.span;
      advance();
      const std::size_t begin = pos_;
      while (pos_ < end_ && src_[pos_] != '}') {
        if (src_[pos_] == '{') {
          throw LexError(LexError::Kind::unterminated_comment, open,
                         "nested '{' inside annotation");
        }
        advance();
      }
      if (pos_ >= end_) {
        throw LexError(LexError::Kind::unterminated_comment, open, "unterminated '{' annotation");
      }
      tok.kind = TokenKind::annotation;
      tok.text = trim(src_.substr(begin, pos_ - begin));
      advance();
    } else if (c == '"') {
      const SourceSpan open = tok.span;
      advance();
      const std::size_t begin = pos_;
      while (pos_ < end_ && src_[pos_] != '"') advance();
      if (pos_ >= end_) {
        throw LexError(LexError::Kind::unterminated_string, open, "unterminated string");
      }
      tok.kind = TokenKind::hole;
      tok.text = collapse_whitespace(src_.substr(begin, pos_ - begin));
      advance();
    } else {
      tok.kind = TokenKind::op;
      tok.text = match_operator();
      if (tok.text.empty()) {
        tok.span.length = 1;
        throw LexError(LexError::Kind::illegal_character, tok.span,
                       std::string("illegal character '") + c + "'");
      }
    }
    tok.span.length = pos_ - tok.offset;
    return tok;
  }

 private:
  static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }

  void skip_whitespace() {
    while (pos_ < end_) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && pos_ + 1 < end_ && src_[pos_ + 1] == '/') {
        while (pos_ < end_ && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string match_operator() {
    static constexpr std::string_view two[] = {":=", "->", "!=", "<=", ">=", "=>", "..", "+=", "-=", "*="};
    static constexpr std::string_view one[] = {"=", "<", ">", "+", "-", "*", "/", "^", "&",
                                               ",", ";", ":", "(", ")", "[", "]", "|", "!"};
    const std::string_view rest = src_.substr(pos_, end_ - pos_);
    for (auto op : two) {
      if (rest.starts_with(op)) {
        advance();
        advance();
        return std::string(op);
      }
    }
    for (auto op : one) {
      if (rest.starts_with(op)) {
        advance();
        return std::string(op);
      }
    }
    return {};
  }

  std::string_view src_;
  std::size_t end_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
};

/// Tokenizes the whole of `source`. The trailing end token is not included.
inline std::vector<Token> tokenize(std::string_view source) {
  Lexer lexer(source);
  std::vector<Token> out;
  for (Token t = lexer.next(); t.kind != TokenKind::end; t = lexer.next()) {
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace liffig
