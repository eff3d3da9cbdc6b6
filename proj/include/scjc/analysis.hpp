#pragma once

#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "scjc/ast.hpp"

namespace scjc {

// Structural equality. Source spans are ignored.
bool equal(const ExprPtr& a, const ExprPtr& b);
bool equal(const TimeExpr& a, const TimeExpr& b);
bool equal(const ChanSet& a, const ChanSet& b);
bool equal(const ActionPtr& a, const ActionPtr& b);
bool equal(const ProcessPtr& a, const ProcessPtr& b);
bool equal(const CircusParagraph& a, const CircusParagraph& b);
bool equal(const SCJParagraph& a, const SCJParagraph& b);
bool equal(const SCJProgram& a, const SCJProgram& b);
bool equal(const CircusProgram& a, const CircusProgram& b);

using NameSetT = std::set<std::string>;

/// Channels occurring in prefixes, synchronisation and hiding sets, and
/// interrupt triggers. Named action references are not followed.
NameSetT used_channels(const ActionPtr& a);
/// Union over every action paragraph and main action of a process term.
NameSetT used_channels(const ProcessPtr& p);

/// State variables read or written, excluding input variables and
/// block-local declarations.
NameSetT used_variables(const ActionPtr& a);

/// Variables occurring free in an expression.
NameSetT used_variables(const ExprPtr& e);

class PlaceholderCount : public std::runtime_error {
 public:
  explicit PlaceholderCount(std::size_t count)
      : std::runtime_error("context must contain exactly one placeholder, found " +
                           std::to_string(count)),
        count_(count) {}
  std::size_t count() const { return count_; }

 private:
  std::size_t count_;
};

std::size_t count_holes(const ActionPtr& a);

/// Replaces the unique placeholder of `context` with `filler`.
ActionPtr substitute(const ActionPtr& context, const ActionPtr& filler);

using Bindings = std::map<std::string, ExprPtr>;

/// Capture-avoiding replacement of free names by expressions. Names bound by
/// input fields and variable blocks shadow the bindings. Assignment targets
/// are never rewritten.
ExprPtr substitute_names(const ExprPtr& e, const Bindings& b);
TimeExpr substitute_names(const TimeExpr& t, const Bindings& b);
ChanSet substitute_names(const ChanSet& cs, const Bindings& b);
ActionPtr substitute_names(const ActionPtr& a, const Bindings& b);
ProcessPtr substitute_names(const ProcessPtr& p, const Bindings& b);

/// Replaces free occurrences of the action variable `var` by `with`.
ActionPtr substitute_recvar(const ActionPtr& a, const std::string& var, const ActionPtr& with);

/// Pre-order visit of every action node, including nested actions.
void for_each_action(const ActionPtr& a, const std::function<void(const Action&)>& f);

/// Visits every expression reachable from an action (fields, guards,
/// assignments, allocation arguments, channel-set prefixes).
void for_each_expr(const ActionPtr& a, const std::function<void(const ExprPtr&)>& f);
void for_each_subexpr(const ExprPtr& e, const std::function<void(const Expr&)>& f);

}  // namespace scjc
