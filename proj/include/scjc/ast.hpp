#pragma once

// Abstract syntax shared by the SCJ-Circus surface language and the Circus
// Time target calculus. Nodes are immutable once built and are shared through
// `std::shared_ptr<const T>`.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "scjc/diagnostic.hpp"
#include "scjc/value.hpp"

namespace scjc {

enum class IdentKind { Channel, Variable, Process, Action, Paragraph, Constant };

/// Validated name. The text must match `[A-Za-z][A-Za-z0-9_]*`.
class Identifier {
 public:
  Identifier(std::string text, IdentKind kind);

  const std::string& text() const { return text_; }
  IdentKind kind() const { return kind_; }

  static bool valid(const std::string& text);

  bool operator==(const Identifier&) const = default;

 private:
  std::string text_;
  IdentKind kind_;
};

/// Whether a name occurrence denotes a state/local variable or a constant
/// (declared constant, ID member, process parameter). Fixed by the parser
/// from scope information.
enum class NameKind { Variable, Constant };

enum class NewKind { NewI, NewM, NewPR, NewPM };

std::string to_string(NewKind k);

// ---------------------------------------------------------------------------
// Expressions

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class BinOp { Add, Sub, Concat, Eq, Neq, Lt, Le, Gt, Ge, And, Or };

struct Expr {
  struct Num { std::int64_t value; };
  struct Bool { bool value; };
  struct Null {};
  struct Name { std::string text; NameKind kind; };
  struct SeqLit { std::vector<ExprPtr> items; };
  struct Binary { BinOp op; ExprPtr lhs, rhs; };
  struct Not { ExprPtr operand; };
  /// `e in S` / `e notin S` against a named constant set.
  struct Member { ExprPtr element; std::string set; bool negated; };
  struct New { NewKind kind; std::string type; std::vector<ExprPtr> args; };

  using Node = std::variant<Num, Bool, Null, Name, SeqLit, Binary, Not, Member, New>;
  Node node;
};

ExprPtr num(std::int64_t v);
ExprPtr boolean(bool v);
ExprPtr null_expr();
ExprPtr var_name(std::string text);
ExprPtr const_name(std::string text);
ExprPtr seq_lit(std::vector<ExprPtr> items);
ExprPtr binary(BinOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr not_expr(ExprPtr e);
ExprPtr member(ExprPtr element, std::string set, bool negated);
ExprPtr new_expr(NewKind kind, std::string type, std::vector<ExprPtr> args);

/// Builds the literal expression denoting a runtime value. ID members become
/// constant names.
ExprPtr expr_of_value(const Value& v);

// ---------------------------------------------------------------------------
// Time expressions: naturals, named constants or variables, and sums.

struct TimeExpr {
  enum class Form { Literal, Named, Sum };

  Form form = Form::Literal;
  std::int64_t value = 0;
  std::string name;
  NameKind kind = NameKind::Constant;
  std::shared_ptr<const TimeExpr> lhs, rhs;

  static TimeExpr literal(std::int64_t v);
  static TimeExpr constant(std::string name);
  static TimeExpr variable(std::string name);
  static TimeExpr sum(TimeExpr l, TimeExpr r);
};

// ---------------------------------------------------------------------------
// Actions

struct Action;
using ActionPtr = std::shared_ptr<const Action>;

struct CommField {
  enum class Kind { Output, Input, Dot };
  Kind kind;
  ExprPtr expr;      // Output / Dot
  std::string var;   // Input

  static CommField out(ExprPtr e) { return {Kind::Output, std::move(e), {}}; }
  static CommField dot(ExprPtr e) { return {Kind::Dot, std::move(e), {}}; }
  static CommField in(std::string v) { return {Kind::Input, nullptr, std::move(v)}; }
};

/// Channel-set member: a whole channel, or a channel restricted by a prefix
/// of payload values (`c.v`).
struct ChanRef {
  std::string channel;
  std::vector<ExprPtr> prefix;
};
using ChanSet = std::vector<ChanRef>;
using NameSet = std::vector<std::string>;

struct VarDecl {
  std::string name;
  Sort sort;
  bool operator==(const VarDecl&) const = default;
};

struct GuardedBranch {
  ExprPtr guard;
  ActionPtr body;
};

struct Action {
  struct Skip {};
  struct Stop {};
  struct Prefix { std::string channel; std::vector<CommField> fields; ActionPtr cont; };
  struct ExtChoice { ActionPtr lhs, rhs; };
  struct IntChoice { ActionPtr lhs, rhs; };
  struct Seq { ActionPtr lhs, rhs; };
  struct Parallel { NameSet ns1; ChanSet cs; NameSet ns2; ActionPtr lhs, rhs; };
  struct Interleave { ActionPtr lhs, rhs; };
  struct Hide { ActionPtr body; ChanSet cs; };
  struct Mu { std::string var; ActionPtr body; };
  /// Reference to an action variable bound by an enclosing `mu`.
  struct RecVar { std::string name; };
  /// Reference to a named action paragraph of the enclosing process.
  struct Call { std::string name; };
  struct Wait { TimeExpr duration; };
  struct WaitRange { TimeExpr lo, hi; };
  /// `body endby d`: body must terminate within d time units.
  struct Deadline { ActionPtr body; TimeExpr d; };
  /// `body startby d`: body must engage in its first event within d units.
  struct StartBy { ActionPtr body; TimeExpr d; };
  struct Interrupt { ActionPtr lhs, rhs; };
  struct Assign { std::string var; bool this_qualified; ExprPtr value; };
  struct VarBlock { std::vector<VarDecl> decls; ActionPtr body; };
  struct Guarded { std::vector<GuardedBranch> branches; };
  struct Alloc { NewKind kind; std::string type; std::vector<ExprPtr> args; };
  /// Placeholder marking the hole of a context.
  struct Hole {};

  using Node = std::variant<Skip, Stop, Prefix, ExtChoice, IntChoice, Seq, Parallel,
                            Interleave, Hide, Mu, RecVar, Call, Wait, WaitRange, Deadline,
                            StartBy, Interrupt, Assign, VarBlock, Guarded, Alloc, Hole>;
  Node node;
  SourceSpan span;
};

ActionPtr make_action(Action::Node node, SourceSpan span = {});
ActionPtr skip();
ActionPtr stop();
ActionPtr hole();
ActionPtr prefix(std::string channel, std::vector<CommField> fields, ActionPtr cont);
ActionPtr ext_choice(ActionPtr l, ActionPtr r);
ActionPtr int_choice(ActionPtr l, ActionPtr r);
ActionPtr seq(ActionPtr l, ActionPtr r);
ActionPtr parallel(NameSet ns1, ChanSet cs, NameSet ns2, ActionPtr l, ActionPtr r);
ActionPtr interleave(ActionPtr l, ActionPtr r);
ActionPtr hide(ActionPtr body, ChanSet cs);
ActionPtr mu(std::string var, ActionPtr body);
ActionPtr rec_var(std::string name);
ActionPtr call(std::string name);
ActionPtr wait(TimeExpr d);
ActionPtr wait_range(TimeExpr lo, TimeExpr hi);
ActionPtr deadline(ActionPtr body, TimeExpr d);
ActionPtr start_by(ActionPtr body, TimeExpr d);
ActionPtr interrupt(ActionPtr l, ActionPtr r);
ActionPtr assign(std::string var, ExprPtr value, bool this_qualified = false);
ActionPtr var_block(std::vector<VarDecl> decls, ActionPtr body);
ActionPtr guarded(std::vector<GuardedBranch> branches);
ActionPtr alloc(NewKind kind, std::string type, std::vector<ExprPtr> args);

/// Folds a non-empty list with the given binary builder, left-associated.
ActionPtr fold_left(const std::vector<ActionPtr>& items, ActionPtr (*op)(ActionPtr, ActionPtr));

ChanSet chanset(std::initializer_list<std::string> channels);

// ---------------------------------------------------------------------------
// Processes

struct Process;
using ProcessPtr = std::shared_ptr<const Process>;

struct ActionDef {
  std::string name;
  ActionPtr body;
};

struct Process {
  struct Basic { std::vector<VarDecl> state; std::vector<ActionDef> actions; ActionPtr main; };
  struct Par { ProcessPtr lhs; ChanSet cs; ProcessPtr rhs; };
  struct Interleave { ProcessPtr lhs, rhs; };
  struct Hide { ProcessPtr body; ChanSet cs; };
  struct Param { std::vector<VarDecl> params; ProcessPtr body; };
  struct Inst { std::string name; std::vector<ExprPtr> args; };
  struct Ref { std::string name; };

  using Node = std::variant<Basic, Par, Interleave, Hide, Param, Inst, Ref>;
  Node node;
  SourceSpan span;
};

ProcessPtr make_process(Process::Node node, SourceSpan span = {});
ProcessPtr basic_process(std::vector<VarDecl> state, std::vector<ActionDef> actions, ActionPtr main);
ProcessPtr proc_par(ProcessPtr l, ChanSet cs, ProcessPtr r);
ProcessPtr proc_interleave(ProcessPtr l, ProcessPtr r);
ProcessPtr proc_hide(ProcessPtr body, ChanSet cs);
ProcessPtr proc_param(std::vector<VarDecl> params, ProcessPtr body);
ProcessPtr proc_inst(std::string name, std::vector<ExprPtr> args);
ProcessPtr proc_ref(std::string name);

// ---------------------------------------------------------------------------
// Paragraphs

struct ChannelDecl {
  std::vector<std::string> names;
  std::vector<Sort> sorts;  // empty for synchronisation-only channels
  SourceSpan span;
};

/// Symbolic natural constants, bound when a model is simulated.
struct ConstDecl {
  std::vector<std::string> names;
  SourceSpan span;
};

/// Members of the ID sort.
struct IdsDecl {
  std::vector<std::string> names;
  SourceSpan span;
};

struct ProcessDecl {
  std::string name;
  ProcessPtr body;
  SourceSpan span;
};

using CircusParagraph = std::variant<ChannelDecl, ConstDecl, IdsDecl, ProcessDecl>;
using CircusProgram = std::vector<CircusParagraph>;

struct MethodDef {
  std::string name;
  ActionPtr body;
  SourceSpan span;
};

/// Constructor (`initial`) with optional parameters.
struct Initial {
  std::vector<VarDecl> params;
  ActionPtr body;
};

struct SafeletDecl {
  std::string name;
  std::vector<VarDecl> state;
  std::vector<MethodDef> methods;
  ActionPtr initialize;
  std::string sequencer_result = "s";
  ActionPtr get_sequencer;
  SourceSpan span;
};

struct SequencerDecl {
  std::string name;
  std::vector<VarDecl> state;
  std::optional<Initial> initial;
  std::string mission_result = "m";
  ActionPtr get_next_mission;
  std::vector<MethodDef> methods;
  SourceSpan span;
};

struct HandlerRef {
  std::string name;
  std::vector<ExprPtr> args;
  SourceSpan span;
};

struct MissionDecl {
  std::string name;
  std::vector<VarDecl> state;
  std::optional<Initial> initial;
  ActionPtr initialize;
  std::vector<HandlerRef> handlers;
  ActionPtr cleanup;
  std::vector<MethodDef> methods;
  SourceSpan span;
};

struct PeriodicHandlerDecl {
  std::string name;
  TimeExpr start;
  TimeExpr period;
  std::vector<VarDecl> state;
  std::optional<Initial> initial;
  ActionPtr handle_async_event;
  std::vector<MethodDef> methods;
  SourceSpan span;
};

struct AperiodicHandlerDecl {
  std::string name;
  std::vector<VarDecl> state;
  std::optional<Initial> initial;
  ActionPtr handle_async_event;
  std::vector<MethodDef> methods;
  SourceSpan span;
};

using SCJParagraph = std::variant<SafeletDecl, SequencerDecl, MissionDecl, PeriodicHandlerDecl,
                                  AperiodicHandlerDecl, CircusParagraph>;
using SCJProgram = std::vector<SCJParagraph>;

enum class ParagraphKind { Safelet, Sequencer, Mission, Handler, Circus };

ParagraphKind paragraph_kind(const SCJParagraph& p);
/// Name of an SCJ paragraph or named Circus paragraph; empty otherwise.
std::string paragraph_name(const SCJParagraph& p);
SourceSpan paragraph_span(const SCJParagraph& p);

/// Identifier constant generated for an SCJ component (`<name>ID`).
std::string component_id(const std::string& name);

}  // namespace scjc
