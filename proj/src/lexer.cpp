#include "scjc/lexer.hpp"

#include <array>
#include <cctype>

namespace scjc {

namespace {

// Longest match first.
constexpr std::array<std::string_view, 35> kSymbols = {
    "|~|", "|||", "->", "..", "[]", "[|", "|]", "{|", "|}", "/\\", ":=", "!=", "<=", ">=",
    "!",   "?",   ".",  ";",  "|",  "\\", "{",  "}",  "(",  ")",  "[",  "]",  "@",  ":",
    ",",   "=",   "<",  ">",  "+",  "-",  "^"};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

}  // namespace

std::vector<Token> tokenize(std::string_view src, const std::string& file) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "--") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.span.file = file;
    t.span.start_line = line;
    t.span.start_col = col;
    std::size_t start = i;
    if (is_ident_start(c)) {
      while (i < src.size() && is_ident_char(src[i])) advance(1);
      t.kind = TokKind::Ident;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) advance(1);
      t.kind = TokKind::Number;
    } else {
      bool matched = false;
      for (auto sym : kSymbols) {
        if (src.substr(i, sym.size()) == sym) {
          advance(sym.size());
          t.kind = TokKind::Symbol;
          matched = true;
          break;
        }
      }
      if (!matched) {
        advance(1);
        t.kind = TokKind::Error;
      }
    }
    t.text = std::string(src.substr(start, i - start));
    t.span.end_line = line;
    t.span.end_col = col;
    out.push_back(std::move(t));
    if (out.back().kind == TokKind::Error) break;
  }
  Token eof;
  eof.kind = TokKind::Eof;
  eof.span = {file, line, col, line, col};
  out.push_back(eof);
  return out;
}

}  // namespace scjc
