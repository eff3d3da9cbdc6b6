#include "scjc/analysis.hpp"

#include <type_traits>

namespace scjc {

namespace {

template <class T, class V>
const T* as(const V& v) {
  return std::get_if<T>(&v);
}

bool equal_list(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!equal(a[i], b[i])) return false;
  return true;
}

bool equal_fields(const std::vector<CommField>& a, const std::vector<CommField>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].kind != b[i].kind) return false;
    if (a[i].kind == CommField::Kind::Input) {
      if (a[i].var != b[i].var) return false;
    } else if (!equal(a[i].expr, b[i].expr)) {
      return false;
    }
  }
  return true;
}

bool equal_initial(const std::optional<Initial>& a, const std::optional<Initial>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return a->params == b->params && equal(a->body, b->body);
}

bool equal_methods(const std::vector<MethodDef>& a, const std::vector<MethodDef>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].name != b[i].name || !equal(a[i].body, b[i].body)) return false;
  return true;
}

}  // namespace

bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, Expr::Num>) return x.value == y.value;
        else if constexpr (std::is_same_v<T, Expr::Bool>) return x.value == y.value;
        else if constexpr (std::is_same_v<T, Expr::Null>) return true;
        else if constexpr (std::is_same_v<T, Expr::Name>) return x.text == y.text && x.kind == y.kind;
        else if constexpr (std::is_same_v<T, Expr::SeqLit>) return equal_list(x.items, y.items);
        else if constexpr (std::is_same_v<T, Expr::Binary>)
          return x.op == y.op && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
        else if constexpr (std::is_same_v<T, Expr::Not>) return equal(x.operand, y.operand);
        else if constexpr (std::is_same_v<T, Expr::Member>)
          return x.set == y.set && x.negated == y.negated && equal(x.element, y.element);
        else
          return x.kind == y.kind && x.type == y.type && equal_list(x.args, y.args);
      },
      a->node);
}

bool equal(const TimeExpr& a, const TimeExpr& b) {
  if (a.form != b.form) return false;
  switch (a.form) {
    case TimeExpr::Form::Literal: return a.value == b.value;
    case TimeExpr::Form::Named: return a.name == b.name && a.kind == b.kind;
    case TimeExpr::Form::Sum: return equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
  }
  return false;
}

bool equal(const ChanSet& a, const ChanSet& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].channel != b[i].channel || !equal_list(a[i].prefix, b[i].prefix)) return false;
  return true;
}

bool equal(const ActionPtr& a, const ActionPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, Action::Skip> || std::is_same_v<T, Action::Stop> ||
                      std::is_same_v<T, Action::Hole>) {
          return true;
        } else if constexpr (std::is_same_v<T, Action::Prefix>) {
          return x.channel == y.channel && equal_fields(x.fields, y.fields) && equal(x.cont, y.cont);
        } else if constexpr (std::is_same_v<T, Action::ExtChoice> ||
                             std::is_same_v<T, Action::IntChoice> ||
                             std::is_same_v<T, Action::Seq> ||
                             std::is_same_v<T, Action::Interleave> ||
                             std::is_same_v<T, Action::Interrupt>) {
          return equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, Action::Parallel>) {
          return x.ns1 == y.ns1 && x.ns2 == y.ns2 && equal(x.cs, y.cs) && equal(x.lhs, y.lhs) &&
                 equal(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, Action::Hide>) {
          return equal(x.cs, y.cs) && equal(x.body, y.body);
        } else if constexpr (std::is_same_v<T, Action::Mu>) {
          return x.var == y.var && equal(x.body, y.body);
        } else if constexpr (std::is_same_v<T, Action::RecVar> || std::is_same_v<T, Action::Call>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, Action::Wait>) {
          return equal(x.duration, y.duration);
        } else if constexpr (std::is_same_v<T, Action::WaitRange>) {
          return equal(x.lo, y.lo) && equal(x.hi, y.hi);
        } else if constexpr (std::is_same_v<T, Action::Deadline> ||
                             std::is_same_v<T, Action::StartBy>) {
          return equal(x.d, y.d) && equal(x.body, y.body);
        } else if constexpr (std::is_same_v<T, Action::Assign>) {
          return x.var == y.var && x.this_qualified == y.this_qualified && equal(x.value, y.value);
        } else if constexpr (std::is_same_v<T, Action::VarBlock>) {
          return x.decls == y.decls && equal(x.body, y.body);
        } else if constexpr (std::is_same_v<T, Action::Guarded>) {
          if (x.branches.size() != y.branches.size()) return false;
          for (std::size_t i = 0; i < x.branches.size(); ++i)
            if (!equal(x.branches[i].guard, y.branches[i].guard) ||
                !equal(x.branches[i].body, y.branches[i].body))
              return false;
          return true;
        } else {
          static_assert(std::is_same_v<T, Action::Alloc>);
          return x.kind == y.kind && x.type == y.type && equal_list(x.args, y.args);
        }
      },
      a->node);
}

bool equal(const ProcessPtr& a, const ProcessPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, Process::Basic>) {
          if (x.state != y.state || x.actions.size() != y.actions.size()) return false;
          for (std::size_t i = 0; i < x.actions.size(); ++i)
            if (x.actions[i].name != y.actions[i].name || !equal(x.actions[i].body, y.actions[i].body))
              return false;
          return equal(x.main, y.main);
        } else if constexpr (std::is_same_v<T, Process::Par>) {
          return equal(x.cs, y.cs) && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, Process::Interleave>) {
          return equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, Process::Hide>) {
          return equal(x.cs, y.cs) && equal(x.body, y.body);
        } else if constexpr (std::is_same_v<T, Process::Param>) {
          return x.params == y.params && equal(x.body, y.body);
        } else if constexpr (std::is_same_v<T, Process::Inst>) {
          return x.name == y.name && equal_list(x.args, y.args);
        } else {
          return x.name == y.name;
        }
      },
      a->node);
}

bool equal(const CircusParagraph& a, const CircusParagraph& b) {
  if (a.index() != b.index()) return false;
  if (auto* x = as<ChannelDecl>(a)) {
    auto* y = as<ChannelDecl>(b);
    return x->names == y->names && x->sorts == y->sorts;
  }
  if (auto* x = as<ConstDecl>(a)) return x->names == as<ConstDecl>(b)->names;
  if (auto* x = as<IdsDecl>(a)) return x->names == as<IdsDecl>(b)->names;
  auto* x = as<ProcessDecl>(a);
  auto* y = as<ProcessDecl>(b);
  return x->name == y->name && equal(x->body, y->body);
}

bool equal(const SCJParagraph& a, const SCJParagraph& b) {
  if (a.index() != b.index()) return false;
  if (auto* x = as<SafeletDecl>(a)) {
    auto* y = as<SafeletDecl>(b);
    return x->name == y->name && x->state == y->state && equal_methods(x->methods, y->methods) &&
           equal(x->initialize, y->initialize) && x->sequencer_result == y->sequencer_result &&
           equal(x->get_sequencer, y->get_sequencer);
  }
  if (auto* x = as<SequencerDecl>(a)) {
    auto* y = as<SequencerDecl>(b);
    return x->name == y->name && x->state == y->state && equal_initial(x->initial, y->initial) &&
           x->mission_result == y->mission_result &&
           equal(x->get_next_mission, y->get_next_mission) && equal_methods(x->methods, y->methods);
  }
  if (auto* x = as<MissionDecl>(a)) {
    auto* y = as<MissionDecl>(b);
    if (x->handlers.size() != y->handlers.size()) return false;
    for (std::size_t i = 0; i < x->handlers.size(); ++i)
      if (x->handlers[i].name != y->handlers[i].name ||
          !equal_list(x->handlers[i].args, y->handlers[i].args))
        return false;
    return x->name == y->name && x->state == y->state && equal_initial(x->initial, y->initial) &&
           equal(x->initialize, y->initialize) && equal(x->cleanup, y->cleanup) &&
           equal_methods(x->methods, y->methods);
  }
  if (auto* x = as<PeriodicHandlerDecl>(a)) {
    auto* y = as<PeriodicHandlerDecl>(b);
    return x->name == y->name && equal(x->start, y->start) && equal(x->period, y->period) &&
           x->state == y->state && equal_initial(x->initial, y->initial) &&
           equal(x->handle_async_event, y->handle_async_event) && equal_methods(x->methods, y->methods);
  }
  if (auto* x = as<AperiodicHandlerDecl>(a)) {
    auto* y = as<AperiodicHandlerDecl>(b);
    return x->name == y->name && x->state == y->state && equal_initial(x->initial, y->initial) &&
           equal(x->handle_async_event, y->handle_async_event) && equal_methods(x->methods, y->methods);
  }
  return equal(std::get<CircusParagraph>(a), std::get<CircusParagraph>(b));
}

bool equal(const SCJProgram& a, const SCJProgram& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!equal(a[i], b[i])) return false;
  return true;
}

bool equal(const CircusProgram& a, const CircusProgram& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!equal(a[i], b[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Traversals

void for_each_action(const ActionPtr& a, const std::function<void(const Action&)>& f) {
  if (!a) return;
  f(*a);
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Action::Prefix>) {
          for_each_action(x.cont, f);
        } else if constexpr (std::is_same_v<T, Action::ExtChoice> ||
                             std::is_same_v<T, Action::IntChoice> ||
                             std::is_same_v<T, Action::Seq> ||
                             std::is_same_v<T, Action::Interleave> ||
                             std::is_same_v<T, Action::Interrupt> ||
                             std::is_same_v<T, Action::Parallel>) {
          for_each_action(x.lhs, f);
          for_each_action(x.rhs, f);
        } else if constexpr (std::is_same_v<T, Action::Hide> || std::is_same_v<T, Action::Mu> ||
                             std::is_same_v<T, Action::Deadline> ||
                             std::is_same_v<T, Action::StartBy> ||
                             std::is_same_v<T, Action::VarBlock>) {
          for_each_action(x.body, f);
        } else if constexpr (std::is_same_v<T, Action::Guarded>) {
          for (const auto& br : x.branches) for_each_action(br.body, f);
        }
      },
      a->node);
}

void for_each_subexpr(const ExprPtr& e, const std::function<void(const Expr&)>& f) {
  if (!e) return;
  f(*e);
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Expr::SeqLit>) {
          for (const auto& i : x.items) for_each_subexpr(i, f);
        } else if constexpr (std::is_same_v<T, Expr::Binary>) {
          for_each_subexpr(x.lhs, f);
          for_each_subexpr(x.rhs, f);
        } else if constexpr (std::is_same_v<T, Expr::Not>) {
          for_each_subexpr(x.operand, f);
        } else if constexpr (std::is_same_v<T, Expr::Member>) {
          for_each_subexpr(x.element, f);
        } else if constexpr (std::is_same_v<T, Expr::New>) {
          for (const auto& i : x.args) for_each_subexpr(i, f);
        }
      },
      e->node);
}

void for_each_expr(const ActionPtr& a, const std::function<void(const ExprPtr&)>& f) {
  auto cs_exprs = [&](const ChanSet& cs) {
    for (const auto& c : cs)
      for (const auto& e : c.prefix) f(e);
  };
  for_each_action(a, [&](const Action& n) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Action::Prefix>) {
            for (const auto& fld : x.fields)
              if (fld.expr) f(fld.expr);
          } else if constexpr (std::is_same_v<T, Action::Parallel> || std::is_same_v<T, Action::Hide>) {
            cs_exprs(x.cs);
          } else if constexpr (std::is_same_v<T, Action::Assign>) {
            f(x.value);
          } else if constexpr (std::is_same_v<T, Action::Guarded>) {
            for (const auto& br : x.branches) f(br.guard);
          } else if constexpr (std::is_same_v<T, Action::Alloc>) {
            for (const auto& e : x.args) f(e);
          }
        },
        n.node);
  });
}

// ---------------------------------------------------------------------------
// Used channels / variables

namespace {

void add_chanset(NameSetT& out, const ChanSet& cs) {
  for (const auto& c : cs) out.insert(c.channel);
}

void collect_process_channels(const ProcessPtr& p, NameSetT& out) {
  if (!p) return;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Process::Basic>) {
          for (const auto& d : x.actions) {
            auto s = used_channels(d.body);
            out.insert(s.begin(), s.end());
          }
          auto s = used_channels(x.main);
          out.insert(s.begin(), s.end());
        } else if constexpr (std::is_same_v<T, Process::Par>) {
          add_chanset(out, x.cs);
          collect_process_channels(x.lhs, out);
          collect_process_channels(x.rhs, out);
        } else if constexpr (std::is_same_v<T, Process::Interleave>) {
          collect_process_channels(x.lhs, out);
          collect_process_channels(x.rhs, out);
        } else if constexpr (std::is_same_v<T, Process::Hide>) {
          add_chanset(out, x.cs);
          collect_process_channels(x.body, out);
        } else if constexpr (std::is_same_v<T, Process::Param>) {
          collect_process_channels(x.body, out);
        }
      },
      p->node);
}

void collect_expr_vars(const ExprPtr& e, const NameSetT& bound, NameSetT& out) {
  for_each_subexpr(e, [&](const Expr& x) {
    if (auto* n = std::get_if<Expr::Name>(&x.node)) {
      if (n->kind == NameKind::Variable && !bound.count(n->text)) out.insert(n->text);
    }
  });
}

void collect_time_vars(const TimeExpr& t, const NameSetT& bound, NameSetT& out) {
  switch (t.form) {
    case TimeExpr::Form::Literal: return;
    case TimeExpr::Form::Named:
      if (t.kind == NameKind::Variable && !bound.count(t.name)) out.insert(t.name);
      return;
    case TimeExpr::Form::Sum:
      collect_time_vars(*t.lhs, bound, out);
      collect_time_vars(*t.rhs, bound, out);
      return;
  }
}

void collect_vars(const ActionPtr& a, NameSetT bound, NameSetT& out) {
  if (!a) return;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Action::Prefix>) {
          NameSetT inner = bound;
          for (const auto& f : x.fields) {
            if (f.kind == CommField::Kind::Input) inner.insert(f.var);
            else collect_expr_vars(f.expr, inner, out);
          }
          collect_vars(x.cont, inner, out);
        } else if constexpr (std::is_same_v<T, Action::ExtChoice> ||
                             std::is_same_v<T, Action::IntChoice> ||
                             std::is_same_v<T, Action::Seq> ||
                             std::is_same_v<T, Action::Interleave> ||
                             std::is_same_v<T, Action::Interrupt>) {
          collect_vars(x.lhs, bound, out);
          collect_vars(x.rhs, bound, out);
        } else if constexpr (std::is_same_v<T, Action::Parallel>) {
          for (const auto& c : x.cs)
            for (const auto& e : c.prefix) collect_expr_vars(e, bound, out);
          collect_vars(x.lhs, bound, out);
          collect_vars(x.rhs, bound, out);
        } else if constexpr (std::is_same_v<T, Action::Hide>) {
          for (const auto& c : x.cs)
            for (const auto& e : c.prefix) collect_expr_vars(e, bound, out);
          collect_vars(x.body, bound, out);
        } else if constexpr (std::is_same_v<T, Action::Mu>) {
          collect_vars(x.body, bound, out);
        } else if constexpr (std::is_same_v<T, Action::Wait>) {
          collect_time_vars(x.duration, bound, out);
        } else if constexpr (std::is_same_v<T, Action::WaitRange>) {
          collect_time_vars(x.lo, bound, out);
          collect_time_vars(x.hi, bound, out);
        } else if constexpr (std::is_same_v<T, Action::Deadline> ||
                             std::is_same_v<T, Action::StartBy>) {
          collect_vars(x.body, bound, out);
          collect_time_vars(x.d, bound, out);
        } else if constexpr (std::is_same_v<T, Action::Assign>) {
          if (x.this_qualified || !bound.count(x.var)) out.insert(x.var);
          collect_expr_vars(x.value, bound, out);
        } else if constexpr (std::is_same_v<T, Action::VarBlock>) {
          NameSetT inner = bound;
          for (const auto& d : x.decls) inner.insert(d.name);
          collect_vars(x.body, inner, out);
        } else if constexpr (std::is_same_v<T, Action::Guarded>) {
          for (const auto& br : x.branches) {
            collect_expr_vars(br.guard, bound, out);
            collect_vars(br.body, bound, out);
          }
        } else if constexpr (std::is_same_v<T, Action::Alloc>) {
          for (const auto& e : x.args) collect_expr_vars(e, bound, out);
        }
      },
      a->node);
}

}  // namespace

NameSetT used_channels(const ActionPtr& a) {
  NameSetT out;
  for_each_action(a, [&](const Action& n) {
    if (auto* p = std::get_if<Action::Prefix>(&n.node)) out.insert(p->channel);
    else if (auto* par = std::get_if<Action::Parallel>(&n.node)) add_chanset(out, par->cs);
    else if (auto* h = std::get_if<Action::Hide>(&n.node)) add_chanset(out, h->cs);
  });
  return out;
}

NameSetT used_channels(const ProcessPtr& p) {
  NameSetT out;
  collect_process_channels(p, out);
  return out;
}

NameSetT used_variables(const ActionPtr& a) {
  NameSetT out;
  collect_vars(a, {}, out);
  return out;
}

NameSetT used_variables(const ExprPtr& e) {
  NameSetT out;
  collect_expr_vars(e, {}, out);
  return out;
}

// ---------------------------------------------------------------------------
// Substitution

std::size_t count_holes(const ActionPtr& a) {
  std::size_t n = 0;
  for_each_action(a, [&](const Action& x) {
    if (std::holds_alternative<Action::Hole>(x.node)) ++n;
  });
  return n;
}

namespace {

/// Generic structural rebuild: `leaf` may replace a node outright; otherwise
/// children are mapped with `rec`.
template <class Rec>
ActionPtr rebuild(const ActionPtr& a, Rec&& rec) {
  return std::visit(
      [&](const auto& x) -> ActionPtr {
        using T = std::decay_t<decltype(x)>;
        T y = x;
        if constexpr (std::is_same_v<T, Action::Prefix>) {
          y.cont = rec(x.cont);
        } else if constexpr (std::is_same_v<T, Action::ExtChoice> ||
                             std::is_same_v<T, Action::IntChoice> ||
                             std::is_same_v<T, Action::Seq> ||
                             std::is_same_v<T, Action::Interleave> ||
                             std::is_same_v<T, Action::Interrupt> ||
                             std::is_same_v<T, Action::Parallel>) {
          y.lhs = rec(x.lhs);
          y.rhs = rec(x.rhs);
        } else if constexpr (std::is_same_v<T, Action::Hide> || std::is_same_v<T, Action::Mu> ||
                             std::is_same_v<T, Action::Deadline> ||
                             std::is_same_v<T, Action::StartBy> ||
                             std::is_same_v<T, Action::VarBlock>) {
          y.body = rec(x.body);
        } else if constexpr (std::is_same_v<T, Action::Guarded>) {
          for (auto& br : y.branches) br.body = rec(br.body);
        } else {
          return a;
        }
        return make_action(std::move(y), a->span);
      },
      a->node);
}

ActionPtr replace_hole(const ActionPtr& a, const ActionPtr& filler) {
  if (std::holds_alternative<Action::Hole>(a->node)) return filler;
  return rebuild(a, [&](const ActionPtr& c) { return replace_hole(c, filler); });
}

Bindings without(const Bindings& b, const std::string& name) {
  if (!b.count(name)) return b;
  Bindings r = b;
  r.erase(name);
  return r;
}

}  // namespace

ActionPtr substitute(const ActionPtr& context, const ActionPtr& filler) {
  auto n = count_holes(context);
  if (n != 1) throw PlaceholderCount(n);
  return replace_hole(context, filler);
}

ExprPtr substitute_names(const ExprPtr& e, const Bindings& b) {
  if (!e || b.empty()) return e;
  return std::visit(
      [&](const auto& x) -> ExprPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Expr::Name>) {
          auto it = b.find(x.text);
          return it == b.end() ? e : it->second;
        } else if constexpr (std::is_same_v<T, Expr::SeqLit>) {
          std::vector<ExprPtr> items;
          for (const auto& i : x.items) items.push_back(substitute_names(i, b));
          return seq_lit(std::move(items));
        } else if constexpr (std::is_same_v<T, Expr::Binary>) {
          return binary(x.op, substitute_names(x.lhs, b), substitute_names(x.rhs, b));
        } else if constexpr (std::is_same_v<T, Expr::Not>) {
          return not_expr(substitute_names(x.operand, b));
        } else if constexpr (std::is_same_v<T, Expr::Member>) {
          return member(substitute_names(x.element, b), x.set, x.negated);
        } else if constexpr (std::is_same_v<T, Expr::New>) {
          std::vector<ExprPtr> args;
          for (const auto& i : x.args) args.push_back(substitute_names(i, b));
          return new_expr(x.kind, x.type, std::move(args));
        } else {
          return e;
        }
      },
      e->node);
}

TimeExpr substitute_names(const TimeExpr& t, const Bindings& b) {
  switch (t.form) {
    case TimeExpr::Form::Literal: return t;
    case TimeExpr::Form::Named: {
      auto it = b.find(t.name);
      if (it == b.end()) return t;
      if (auto* n = std::get_if<Expr::Num>(&it->second->node)) return TimeExpr::literal(n->value);
      if (auto* nm = std::get_if<Expr::Name>(&it->second->node)) {
        TimeExpr r = t;
        r.name = nm->text;
        r.kind = nm->kind;
        return r;
      }
      return t;
    }
    case TimeExpr::Form::Sum:
      return TimeExpr::sum(substitute_names(*t.lhs, b), substitute_names(*t.rhs, b));
  }
  return t;
}

ChanSet substitute_names(const ChanSet& cs, const Bindings& b) {
  ChanSet out = cs;
  for (auto& c : out)
    for (auto& e : c.prefix) e = substitute_names(e, b);
  return out;
}

ActionPtr substitute_names(const ActionPtr& a, const Bindings& b) {
  if (!a || b.empty()) return a;
  return std::visit(
      [&](const auto& x) -> ActionPtr {
        using T = std::decay_t<decltype(x)>;
        T y = x;
        if constexpr (std::is_same_v<T, Action::Prefix>) {
          Bindings inner = b;
          for (auto& f : y.fields) {
            if (f.kind == CommField::Kind::Input) inner = without(inner, f.var);
            else f.expr = substitute_names(f.expr, inner);
          }
          y.cont = substitute_names(x.cont, inner);
        } else if constexpr (std::is_same_v<T, Action::ExtChoice> ||
                             std::is_same_v<T, Action::IntChoice> ||
                             std::is_same_v<T, Action::Seq> ||
                             std::is_same_v<T, Action::Interleave> ||
                             std::is_same_v<T, Action::Interrupt>) {
          y.lhs = substitute_names(x.lhs, b);
          y.rhs = substitute_names(x.rhs, b);
        } else if constexpr (std::is_same_v<T, Action::Parallel>) {
          y.cs = substitute_names(x.cs, b);
          y.lhs = substitute_names(x.lhs, b);
          y.rhs = substitute_names(x.rhs, b);
        } else if constexpr (std::is_same_v<T, Action::Hide>) {
          y.cs = substitute_names(x.cs, b);
          y.body = substitute_names(x.body, b);
        } else if constexpr (std::is_same_v<T, Action::Mu>) {
          y.body = substitute_names(x.body, b);
        } else if constexpr (std::is_same_v<T, Action::Wait>) {
          y.duration = substitute_names(x.duration, b);
        } else if constexpr (std::is_same_v<T, Action::WaitRange>) {
          y.lo = substitute_names(x.lo, b);
          y.hi = substitute_names(x.hi, b);
        } else if constexpr (std::is_same_v<T, Action::Deadline> ||
                             std::is_same_v<T, Action::StartBy>) {
          y.body = substitute_names(x.body, b);
          y.d = substitute_names(x.d, b);
        } else if constexpr (std::is_same_v<T, Action::Assign>) {
          y.value = substitute_names(x.value, b);
        } else if constexpr (std::is_same_v<T, Action::VarBlock>) {
          Bindings inner = b;
          for (const auto& d : x.decls) inner = without(inner, d.name);
          y.body = substitute_names(x.body, inner);
        } else if constexpr (std::is_same_v<T, Action::Guarded>) {
          for (auto& br : y.branches) {
            br.guard = substitute_names(br.guard, b);
            br.body = substitute_names(br.body, b);
          }
        } else if constexpr (std::is_same_v<T, Action::Alloc>) {
          for (auto& e : y.args) e = substitute_names(e, b);
        } else {
          return a;
        }
        return make_action(std::move(y), a->span);
      },
      a->node);
}

ProcessPtr substitute_names(const ProcessPtr& p, const Bindings& b) {
  if (!p || b.empty()) return p;
  return std::visit(
      [&](const auto& x) -> ProcessPtr {
        using T = std::decay_t<decltype(x)>;
        T y = x;
        if constexpr (std::is_same_v<T, Process::Basic>) {
          Bindings inner = b;
          for (const auto& d : x.state) inner = without(inner, d.name);
          for (auto& d : y.actions) d.body = substitute_names(d.body, inner);
          y.main = substitute_names(x.main, inner);
        } else if constexpr (std::is_same_v<T, Process::Par>) {
          y.cs = substitute_names(x.cs, b);
          y.lhs = substitute_names(x.lhs, b);
          y.rhs = substitute_names(x.rhs, b);
        } else if constexpr (std::is_same_v<T, Process::Interleave>) {
          y.lhs = substitute_names(x.lhs, b);
          y.rhs = substitute_names(x.rhs, b);
        } else if constexpr (std::is_same_v<T, Process::Hide>) {
          y.cs = substitute_names(x.cs, b);
          y.body = substitute_names(x.body, b);
        } else if constexpr (std::is_same_v<T, Process::Param>) {
          Bindings inner = b;
          for (const auto& d : x.params) inner = without(inner, d.name);
          y.body = substitute_names(x.body, inner);
        } else if constexpr (std::is_same_v<T, Process::Inst>) {
          for (auto& e : y.args) e = substitute_names(e, b);
        } else {
          return p;
        }
        return make_process(std::move(y), p->span);
      },
      p->node);
}

ActionPtr substitute_recvar(const ActionPtr& a, const std::string& var, const ActionPtr& with) {
  if (!a) return a;
  if (auto* r = std::get_if<Action::RecVar>(&a->node)) return r->name == var ? with : a;
  if (auto* m = std::get_if<Action::Mu>(&a->node)) {
    if (m->var == var) return a;
  }
  return rebuild(a, [&](const ActionPtr& c) { return substitute_recvar(c, var, with); });
}

}  // namespace scjc
