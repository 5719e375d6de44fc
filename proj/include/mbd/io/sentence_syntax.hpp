#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>

#include "mbd/error.hpp"
#include "mbd/sentence.hpp"

namespace mbd::io {

inline bool is_identifier_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool is_identifier_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !is_identifier_start(s.front())) return false;
  for (char c : s) {
    if (!is_identifier_char(c)) return false;
  }
  return true;
}

// Recursive-descent parser for the infix sentence syntax:
//
//   iff     := implies { "<->" implies }        (left-associative)
//   implies := or [ "->" implies ]              (right-associative)
//   or      := and { "|" and }
//   and     := unary { "&" unary }
//   unary   := "!" unary | "(" iff ")" | "true" | "false" | identifier
//
// `line` and `column_offset` place error locations inside the enclosing document.
class SentenceParser {
 public:
  SentenceParser(std::string_view text, std::size_t line = 1, std::size_t column_offset = 0)
      : text_(text), line_(line), offset_(column_offset) {}

  Sentence parse() {
    Sentence s = parse_iff();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return s;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, line_, offset_ + pos_ + 1); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  // "->" must not be taken as the tail of "<->".
  bool peek_arrow() {
    skip_space();
    return text_.substr(pos_, 2) == "->";
  }

  Sentence parse_iff() {
    Sentence left = parse_implies();
    while (accept("<->")) left = iff(left, parse_implies());
    return left;
  }

  Sentence parse_implies() {
    Sentence left = parse_or();
    if (peek_arrow()) {
      pos_ += 2;
      return implies(left, parse_implies());
    }
    return left;
  }

  Sentence parse_or() {
    Sentence left = parse_and();
    while (accept("|")) left = disj(left, parse_and());
    return left;
  }

  Sentence parse_and() {
    Sentence left = parse_unary();
    while (accept("&")) left = conj(left, parse_unary());
    return left;
  }

  Sentence parse_unary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of sentence");
    if (accept("!")) return neg(parse_unary());
    if (accept("(")) {
      Sentence inner = parse_iff();
      if (!accept(")")) fail("expected ')'");
      return inner;
    }
    if (!is_identifier_start(text_[pos_])) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_identifier_char(text_[pos_])) ++pos_;
    const std::string word(text_.substr(start, pos_ - start));
    if (word == "true") return Sentence::constant(true);
    if (word == "false") return Sentence::constant(false);
    return atom(word);
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t offset_;
  std::size_t pos_ = 0;
};

inline Sentence parse_sentence(std::string_view text, std::size_t line = 1, std::size_t column_offset = 0) {
  return SentenceParser(text, line, column_offset).parse();
}

}  // namespace mbd::io
