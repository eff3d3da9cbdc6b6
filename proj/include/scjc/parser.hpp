#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "scjc/ast.hpp"
#include "scjc/diagnostic.hpp"

namespace scjc {

/// Either a value or at least one error diagnostic, never both.
template <class T>
struct ParseResult {
  std::optional<T> value;
  Diagnostics diagnostics;

  bool ok() const { return value.has_value(); }
};

/// Names in scope when parsing a fragment on its own. Expression names found
/// in `variables` (or bound inside the fragment) are variables, names in
/// `constants` are constants, and any other expression name is a variable.
/// Time-expression names are variables only when bound as variables.
struct ParseScope {
  std::set<std::string> constants;
  std::set<std::string> variables;
};

ParseResult<SCJProgram> parse_program(std::string_view src, const std::string& file = "");
ParseResult<CircusProgram> parse_circus_program(std::string_view src, const std::string& file = "");
ParseResult<ActionPtr> parse_action(std::string_view src, const ParseScope& scope = {});
ParseResult<ProcessPtr> parse_process(std::string_view src, const ParseScope& scope = {});
ParseResult<ExprPtr> parse_expr(std::string_view src, const ParseScope& scope = {});

}  // namespace scjc
