#pragma once

#include <string>

#include "scjc/ast.hpp"

namespace scjc {

// Renders ASTs in the ASCII concrete syntax accepted by the parser
// (docs/grammar.ebnf). Parentheses are inserted exactly where needed for
// the parser to rebuild the same tree.

std::string pretty_print(const ExprPtr& e);
std::string pretty_print(const TimeExpr& t);
std::string pretty_print(const ChanSet& cs);
std::string pretty_print(const ActionPtr& a);
std::string pretty_print(const ProcessPtr& p);
std::string pretty_print(const CircusParagraph& p);
std::string pretty_print(const SCJParagraph& p);
std::string pretty_print(const SCJProgram& p);
std::string pretty_print(const CircusProgram& p);

}  // namespace scjc
