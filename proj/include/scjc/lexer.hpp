#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "scjc/diagnostic.hpp"

namespace scjc {

enum class TokKind { Ident, Number, Symbol, Eof, Error };

struct Token {
  TokKind kind = TokKind::Eof;
  std::string text;
  SourceSpan span;

  bool is(std::string_view sym) const { return kind == TokKind::Symbol && text == sym; }
  bool is_ident(std::string_view name) const { return kind == TokKind::Ident && text == name; }
};

/// Splits source text into tokens. The last token is always Eof; an invalid
/// character yields a single Error token at its position followed by Eof.
std::vector<Token> tokenize(std::string_view src, const std::string& file = "");

}  // namespace scjc
