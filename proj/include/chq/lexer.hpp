// Line tokenizer shared by the scenario file format and event expressions.
#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "chq/core.hpp"

namespace chq::text {

struct Token {
  enum class Kind { Ident, Int, Number, String, Sym, End };
  Kind kind = Kind::End;
  std::string text;
  std::size_t column = 0;  // 1-based
};

/// Columns are reported as position in `line` plus `column_offset`.
inline std::vector<Token> tokenize(std::string_view line, std::size_t line_no, std::size_t column_offset = 0) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_ident_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
  auto is_ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  while (i < line.size()) {
    const char c = line[i];
    const std::size_t col = i + 1 + column_offset;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      break;
    } else if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < line.size() && is_ident(line[j])) ++j;
      out.push_back({Token::Kind::Ident, std::string(line.substr(i, j - i)), col});
      i = j;
    } else if (is_digit(c)) {
      std::size_t j = i;
      bool real = false;
      while (j < line.size() && is_digit(line[j])) ++j;
      if (j < line.size() && line[j] == '.') {
        real = true;
        ++j;
        while (j < line.size() && is_digit(line[j])) ++j;
      }
      if (j < line.size() && (line[j] == 'e' || line[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < line.size() && (line[k] == '+' || line[k] == '-')) ++k;
        if (k < line.size() && is_digit(line[k])) {
          real = true;
          j = k;
          while (j < line.size() && is_digit(line[j])) ++j;
        }
      }
      out.push_back({real ? Token::Kind::Number : Token::Kind::Int, std::string(line.substr(i, j - i)), col});
      i = j;
    } else if (c == '"') {
      const std::size_t close = line.find('"', i + 1);
      if (close == std::string_view::npos) throw ParseError("unterminated string", line_no, col);
      out.push_back({Token::Kind::String, std::string(line.substr(i + 1, close - i - 1)), col});
      i = close + 1;
    } else if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
      out.push_back({Token::Kind::Sym, "->", col});
      i += 2;
    } else if (std::string_view("=:;,()[]|<>+-*/@~").find(c) != std::string_view::npos) {
      out.push_back({Token::Kind::Sym, std::string(1, c), col});
      ++i;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", line_no, col);
    }
  }
  out.push_back({Token::Kind::End, "", line.size() + 1 + column_offset});
  return out;
}

/// Cursor over one line's tokens with error reporting.
class Cursor {
 public:
  Cursor(std::vector<Token> tokens, std::size_t line_no) : toks_(std::move(tokens)), line_(line_no) {}

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  bool is_sym(std::string_view s, std::size_t ahead = 0) const {
    return peek(ahead).kind == Token::Kind::Sym && peek(ahead).text == s;
  }
  bool is_word(std::string_view w) const { return peek().kind == Token::Kind::Ident && peek().text == w; }

  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }

  bool accept_sym(std::string_view s) {
    if (!is_sym(s)) return false;
    next();
    return true;
  }
  bool accept_word(std::string_view w) {
    if (!is_word(w)) return false;
    next();
    return true;
  }

  void expect_sym(std::string_view s) {
    if (!accept_sym(s)) fail("expected '" + std::string(s) + "'");
  }
  std::string expect_ident(std::string_view what = "identifier") {
    if (peek().kind != Token::Kind::Ident) fail("expected " + std::string(what));
    return next().text;
  }
  std::string expect_string() {
    if (peek().kind != Token::Kind::String) fail("expected quoted string");
    return next().text;
  }
  void expect_end() {
    if (!at_end()) fail("unexpected '" + peek().text + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(msg + (t.kind == Token::Kind::End ? " at end of line" : ""), line_, t.column);
  }

  std::size_t line() const noexcept { return line_; }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

}  // namespace chq::text
