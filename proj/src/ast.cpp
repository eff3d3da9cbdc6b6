#include "scjc/ast.hpp"

#include <cctype>

namespace scjc {

Identifier::Identifier(std::string text, IdentKind kind) : text_(std::move(text)), kind_(kind) {
  if (!valid(text_)) throw std::invalid_argument("invalid identifier: '" + text_ + "'");
}

bool Identifier::valid(const std::string& text) {
  if (text.empty() || !std::isalpha(static_cast<unsigned char>(text[0]))) return false;
  for (char c : text) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

std::string to_string(NewKind k) {
  switch (k) {
    case NewKind::NewI: return "newI";
    case NewKind::NewM: return "newM";
    case NewKind::NewPR: return "newPR";
    case NewKind::NewPM: return "newPM";
  }
  return "new?";
}

// ---------------------------------------------------------------------------

namespace {
ExprPtr mk(Expr::Node n) { return std::make_shared<const Expr>(Expr{std::move(n)}); }
}  // namespace

ExprPtr num(std::int64_t v) { return mk(Expr::Num{v}); }
ExprPtr boolean(bool v) { return mk(Expr::Bool{v}); }
ExprPtr null_expr() { return mk(Expr::Null{}); }
ExprPtr var_name(std::string text) { return mk(Expr::Name{std::move(text), NameKind::Variable}); }
ExprPtr const_name(std::string text) { return mk(Expr::Name{std::move(text), NameKind::Constant}); }
ExprPtr seq_lit(std::vector<ExprPtr> items) { return mk(Expr::SeqLit{std::move(items)}); }
ExprPtr binary(BinOp op, ExprPtr lhs, ExprPtr rhs) {
  return mk(Expr::Binary{op, std::move(lhs), std::move(rhs)});
}
ExprPtr not_expr(ExprPtr e) { return mk(Expr::Not{std::move(e)}); }
ExprPtr member(ExprPtr element, std::string set, bool negated) {
  return mk(Expr::Member{std::move(element), std::move(set), negated});
}
ExprPtr new_expr(NewKind kind, std::string type, std::vector<ExprPtr> args) {
  return mk(Expr::New{kind, std::move(type), std::move(args)});
}

ExprPtr expr_of_value(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Nat: return num(v.nat);
    case Value::Kind::Bool: return boolean(v.boolean);
    case Value::Kind::Null: return null_expr();
    case Value::Kind::Id: return const_name(v.id);
    case Value::Kind::Seq: {
      std::vector<ExprPtr> items;
      for (auto n : v.seq) items.push_back(num(n));
      return seq_lit(std::move(items));
    }
  }
  return num(0);
}

// ---------------------------------------------------------------------------

TimeExpr TimeExpr::literal(std::int64_t v) {
  TimeExpr t;
  t.form = Form::Literal;
  t.value = v;
  return t;
}

TimeExpr TimeExpr::constant(std::string name) {
  TimeExpr t;
  t.form = Form::Named;
  t.name = std::move(name);
  t.kind = NameKind::Constant;
  return t;
}

TimeExpr TimeExpr::variable(std::string name) {
  TimeExpr t;
  t.form = Form::Named;
  t.name = std::move(name);
  t.kind = NameKind::Variable;
  return t;
}

TimeExpr TimeExpr::sum(TimeExpr l, TimeExpr r) {
  TimeExpr t;
  t.form = Form::Sum;
  t.lhs = std::make_shared<const TimeExpr>(std::move(l));
  t.rhs = std::make_shared<const TimeExpr>(std::move(r));
  return t;
}

// ---------------------------------------------------------------------------

ActionPtr make_action(Action::Node node, SourceSpan span) {
  return std::make_shared<const Action>(Action{std::move(node), std::move(span)});
}

ActionPtr skip() { return make_action(Action::Skip{}); }
ActionPtr stop() { return make_action(Action::Stop{}); }
ActionPtr hole() { return make_action(Action::Hole{}); }
ActionPtr prefix(std::string channel, std::vector<CommField> fields, ActionPtr cont) {
  return make_action(Action::Prefix{std::move(channel), std::move(fields), std::move(cont)});
}
ActionPtr ext_choice(ActionPtr l, ActionPtr r) { return make_action(Action::ExtChoice{l, r}); }
ActionPtr int_choice(ActionPtr l, ActionPtr r) { return make_action(Action::IntChoice{l, r}); }
ActionPtr seq(ActionPtr l, ActionPtr r) { return make_action(Action::Seq{l, r}); }
ActionPtr parallel(NameSet ns1, ChanSet cs, NameSet ns2, ActionPtr l, ActionPtr r) {
  return make_action(Action::Parallel{std::move(ns1), std::move(cs), std::move(ns2), l, r});
}
ActionPtr interleave(ActionPtr l, ActionPtr r) { return make_action(Action::Interleave{l, r}); }
ActionPtr hide(ActionPtr body, ChanSet cs) { return make_action(Action::Hide{body, std::move(cs)}); }
ActionPtr mu(std::string var, ActionPtr body) { return make_action(Action::Mu{std::move(var), body}); }
ActionPtr rec_var(std::string name) { return make_action(Action::RecVar{std::move(name)}); }
ActionPtr call(std::string name) { return make_action(Action::Call{std::move(name)}); }
ActionPtr wait(TimeExpr d) { return make_action(Action::Wait{std::move(d)}); }
ActionPtr wait_range(TimeExpr lo, TimeExpr hi) {
  return make_action(Action::WaitRange{std::move(lo), std::move(hi)});
}
ActionPtr deadline(ActionPtr body, TimeExpr d) { return make_action(Action::Deadline{body, std::move(d)}); }
ActionPtr start_by(ActionPtr body, TimeExpr d) { return make_action(Action::StartBy{body, std::move(d)}); }
ActionPtr interrupt(ActionPtr l, ActionPtr r) { return make_action(Action::Interrupt{l, r}); }
ActionPtr assign(std::string var, ExprPtr value, bool this_qualified) {
  return make_action(Action::Assign{std::move(var), this_qualified, std::move(value)});
}
ActionPtr var_block(std::vector<VarDecl> decls, ActionPtr body) {
  return make_action(Action::VarBlock{std::move(decls), body});
}
ActionPtr guarded(std::vector<GuardedBranch> branches) {
  return make_action(Action::Guarded{std::move(branches)});
}
ActionPtr alloc(NewKind kind, std::string type, std::vector<ExprPtr> args) {
  return make_action(Action::Alloc{kind, std::move(type), std::move(args)});
}

ActionPtr fold_left(const std::vector<ActionPtr>& items, ActionPtr (*op)(ActionPtr, ActionPtr)) {
  if (items.empty()) throw std::invalid_argument("fold_left: empty list");
  ActionPtr acc = items.front();
  for (std::size_t i = 1; i < items.size(); ++i) acc = op(acc, items[i]);
  return acc;
}

ChanSet chanset(std::initializer_list<std::string> channels) {
  ChanSet cs;
  for (const auto& c : channels) cs.push_back(ChanRef{c, {}});
  return cs;
}

// ---------------------------------------------------------------------------

ProcessPtr make_process(Process::Node node, SourceSpan span) {
  return std::make_shared<const Process>(Process{std::move(node), std::move(span)});
}
ProcessPtr basic_process(std::vector<VarDecl> state, std::vector<ActionDef> actions, ActionPtr main) {
  return make_process(Process::Basic{std::move(state), std::move(actions), std::move(main)});
}
ProcessPtr proc_par(ProcessPtr l, ChanSet cs, ProcessPtr r) {
  return make_process(Process::Par{std::move(l), std::move(cs), std::move(r)});
}
ProcessPtr proc_interleave(ProcessPtr l, ProcessPtr r) {
  return make_process(Process::Interleave{std::move(l), std::move(r)});
}
ProcessPtr proc_hide(ProcessPtr body, ChanSet cs) {
  return make_process(Process::Hide{std::move(body), std::move(cs)});
}
ProcessPtr proc_param(std::vector<VarDecl> params, ProcessPtr body) {
  return make_process(Process::Param{std::move(params), std::move(body)});
}
ProcessPtr proc_inst(std::string name, std::vector<ExprPtr> args) {
  return make_process(Process::Inst{std::move(name), std::move(args)});
}
ProcessPtr proc_ref(std::string name) { return make_process(Process::Ref{std::move(name)}); }

// ---------------------------------------------------------------------------

ParagraphKind paragraph_kind(const SCJParagraph& p) {
  switch (p.index()) {
    case 0: return ParagraphKind::Safelet;
    case 1: return ParagraphKind::Sequencer;
    case 2: return ParagraphKind::Mission;
    case 3:
    case 4: return ParagraphKind::Handler;
    default: return ParagraphKind::Circus;
  }
}

std::string paragraph_name(const SCJParagraph& p) {
  return std::visit(
      [](const auto& d) -> std::string {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, CircusParagraph>) {
          if (auto* pd = std::get_if<ProcessDecl>(&d)) return pd->name;
          return {};
        } else {
          return d.name;
        }
      },
      p);
}

SourceSpan paragraph_span(const SCJParagraph& p) {
  return std::visit(
      [](const auto& d) -> SourceSpan {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, CircusParagraph>) {
          return std::visit([](const auto& c) { return c.span; }, d);
        } else {
          return d.span;
        }
      },
      p);
}

std::string component_id(const std::string& name) { return name + "ID"; }

}  // namespace scjc
