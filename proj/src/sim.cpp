#include "scjc/sim.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "scjc/analysis.hpp"
#include "scjc/printer.hpp"

namespace scjc {

using Store = std::map<std::string, Value>;
using Defs = std::map<std::string, ActionPtr>;

class Network {
 public:
  std::map<std::string, std::vector<Sort>> channels;
  std::vector<std::string> ids;
  ConstBindings consts;
  SimOptions options;
  std::map<std::string, ProcessPtr> processes;

  std::vector<Value> domain(Sort s) const {
    std::vector<Value> out;
    switch (s) {
      case Sort::Nat:
        for (auto n : options.nat_domain) out.push_back(Value::of_nat(n));
        break;
      case Sort::Bool: out = {Value::of_bool(false), Value::of_bool(true)}; break;
      case Sort::Id:
        for (const auto& i : ids) out.push_back(Value::of_id(i));
        out.push_back(Value::null());
        break;
      case Sort::Seq: out.push_back(Value::of_seq({})); break;
      case Sort::Unit: out.push_back(Value::of_nat(0)); break;
    }
    return out;
  }

  const std::vector<Sort>& sorts(const std::string& channel) const {
    auto it = channels.find(channel);
    if (it == channels.end()) throw SimError("undeclared channel " + channel);
    return it->second;
  }
};

struct ChanPat {
  std::string channel;
  std::vector<Value> prefix;
};

struct SimNode {
  enum class K { Act, Skip, Stop, Seq, Ext, Par, Inter, Hide, Wait, Deadline, StartBy, Interrupt, Scope, Leaf };
  K k = K::Skip;
  ActionPtr act;  // Act; right operand of Seq
  std::shared_ptr<const SimNode> l, r;
  std::vector<ChanPat> cs;
  std::int64_t n = 0;  // Wait remainder, Deadline / StartBy budget
  std::string label;   // obligation text, Leaf component name
  std::vector<VarDecl> decls;
  std::vector<std::optional<Value>> saved;
  std::shared_ptr<const Store> store;
  std::shared_ptr<const Defs> defs;
  mutable std::string key_cache;
};

namespace {

using NodeP = std::shared_ptr<const SimNode>;
using K = SimNode::K;

struct Ctx {
  const Network* net;
  Store* store = nullptr;
  const Defs* defs = nullptr;
  int unfoldings = 0;
};

// ---------------------------------------------------------------------------
// Evaluation

bool same_last_three(const Value& v) {
  if (v.kind != Value::Kind::Seq || v.seq.size() < 3) return false;
  auto n = v.seq.size();
  return v.seq[n - 1] == v.seq[n - 2] && v.seq[n - 2] == v.seq[n - 3];
}

std::optional<Value> lookup_constant(const Network& net, const std::string& name) {
  if (auto it = net.consts.find(name); it != net.consts.end()) return Value::of_nat(it->second);
  if (std::find(net.ids.begin(), net.ids.end(), name) != net.ids.end()) return Value::of_id(name);
  return std::nullopt;
}

std::int64_t as_nat(const Value& v, const char* what) {
  if (v.kind != Value::Kind::Nat) throw SimError(std::string("expected a natural in ") + what);
  return v.nat;
}

bool as_bool(const Value& v) {
  if (v.kind != Value::Kind::Bool) throw SimError("expected a boolean");
  return v.boolean;
}

Value eval(const ExprPtr& e, const Ctx& c) {
  return std::visit(
      [&](const auto& x) -> Value {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Expr::Num>) {
          return Value::of_nat(x.value);
        } else if constexpr (std::is_same_v<T, Expr::Bool>) {
          return Value::of_bool(x.value);
        } else if constexpr (std::is_same_v<T, Expr::Null>) {
          return Value::null();
        } else if constexpr (std::is_same_v<T, Expr::Name>) {
          if (x.kind == NameKind::Variable && c.store) {
            if (auto it = c.store->find(x.text); it != c.store->end()) return it->second;
          }
          if (auto v = lookup_constant(*c.net, x.text)) return *v;
          if (c.store) {
            if (auto it = c.store->find(x.text); it != c.store->end()) return it->second;
          }
          throw SimError("unbound name " + x.text);
        } else if constexpr (std::is_same_v<T, Expr::SeqLit>) {
          std::vector<std::int64_t> items;
          for (const auto& i : x.items) items.push_back(as_nat(eval(i, c), "sequence literal"));
          return Value::of_seq(std::move(items));
        } else if constexpr (std::is_same_v<T, Expr::Binary>) {
          auto a = eval(x.lhs, c);
          auto b = eval(x.rhs, c);
          switch (x.op) {
            case BinOp::Add: return Value::of_nat(as_nat(a, "+") + as_nat(b, "+"));
            case BinOp::Sub: return Value::of_nat(std::max<std::int64_t>(0, as_nat(a, "-") - as_nat(b, "-")));
            case BinOp::Concat: {
              if (a.kind != Value::Kind::Seq || b.kind != Value::Kind::Seq) throw SimError("^ expects sequences");
              auto s = a.seq;
              s.insert(s.end(), b.seq.begin(), b.seq.end());
              return Value::of_seq(std::move(s));
            }
            case BinOp::Eq: return Value::of_bool(a == b);
            case BinOp::Neq: return Value::of_bool(a != b);
            case BinOp::Lt: return Value::of_bool(as_nat(a, "<") < as_nat(b, "<"));
            case BinOp::Le: return Value::of_bool(as_nat(a, "<=") <= as_nat(b, "<="));
            case BinOp::Gt: return Value::of_bool(as_nat(a, ">") > as_nat(b, ">"));
            case BinOp::Ge: return Value::of_bool(as_nat(a, ">=") >= as_nat(b, ">="));
            case BinOp::And: return Value::of_bool(as_bool(a) && as_bool(b));
            case BinOp::Or: return Value::of_bool(as_bool(a) || as_bool(b));
          }
          return Value::null();
        } else if constexpr (std::is_same_v<T, Expr::Not>) {
          return Value::of_bool(!as_bool(eval(x.operand, c)));
        } else if constexpr (std::is_same_v<T, Expr::Member>) {
          if (x.set != "theSame") throw SimError("unknown set " + x.set);
          bool in = same_last_three(eval(x.element, c));
          return Value::of_bool(x.negated ? !in : in);
        } else {
          // Allocation yields a reference to the component of that type.
          return Value::of_id(component_id(x.type));
        }
      },
      e->node);
}

std::int64_t eval_time(const TimeExpr& t, const Ctx& c) {
  switch (t.form) {
    case TimeExpr::Form::Literal: return t.value;
    case TimeExpr::Form::Named: {
      if (t.kind == NameKind::Variable && c.store) {
        if (auto it = c.store->find(t.name); it != c.store->end()) return as_nat(it->second, t.name.c_str());
      }
      if (auto it = c.net->consts.find(t.name); it != c.net->consts.end()) return it->second;
      throw SimError("unbound time constant " + t.name);
    }
    case TimeExpr::Form::Sum: return eval_time(*t.lhs, c) + eval_time(*t.rhs, c);
  }
  return 0;
}

std::vector<ChanPat> eval_cs(const ChanSet& cs, const Ctx& c) {
  std::vector<ChanPat> out;
  for (const auto& ref : cs) {
    ChanPat p{ref.channel, {}};
    for (const auto& e : ref.prefix) p.prefix.push_back(eval(e, c));
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Term construction. The mk_* builders collapse terminated operands.

SimNode blank(K k) {
  SimNode s;
  s.k = k;
  return s;
}

const NodeP& skip_node() {
  static const NodeP n = std::make_shared<SimNode>(blank(K::Skip));
  return n;
}

const NodeP& stop_node() {
  static const NodeP n = std::make_shared<SimNode>(blank(K::Stop));
  return n;
}

bool is_skip(const NodeP& n) { return n->k == K::Skip; }

NodeP node(SimNode n) { return std::make_shared<const SimNode>(std::move(n)); }

NodeP act(const ActionPtr& a, Ctx& c);

NodeP mk_wait(std::int64_t n) {
  if (n <= 0) return skip_node();
  auto s = blank(K::Wait);
  s.n = n;
  return node(std::move(s));
}

NodeP mk_seq(NodeP l, const ActionPtr& r, Ctx& c) {
  if (is_skip(l)) return act(r, c);
  auto s = blank(K::Seq);
  s.l = std::move(l);
  s.act = r;
  return node(std::move(s));
}

NodeP mk_binary(K k, NodeP l, NodeP r) {
  auto s = blank(k);
  s.l = std::move(l);
  s.r = std::move(r);
  return node(std::move(s));
}

// Termination of either operand resolves the choice.
NodeP mk_ext(NodeP l, NodeP r) {
  if (is_skip(l) || is_skip(r)) return skip_node();
  return mk_binary(K::Ext, std::move(l), std::move(r));
}

NodeP mk_par(std::vector<ChanPat> cs, NodeP l, NodeP r) {
  if (is_skip(l) && is_skip(r)) return skip_node();
  auto s = blank(K::Par);
  s.cs = std::move(cs);
  s.l = std::move(l);
  s.r = std::move(r);
  return node(std::move(s));
}

NodeP mk_inter(NodeP l, NodeP r) {
  if (is_skip(l) && is_skip(r)) return skip_node();
  return mk_binary(K::Inter, std::move(l), std::move(r));
}

NodeP mk_hide(NodeP body, std::vector<ChanPat> cs) {
  if (is_skip(body)) return body;
  auto s = blank(K::Hide);
  s.l = std::move(body);
  s.cs = std::move(cs);
  return node(std::move(s));
}

NodeP mk_budget(K k, NodeP body, std::int64_t n, std::string label) {
  if (is_skip(body)) return body;
  auto s = blank(k);
  s.l = std::move(body);
  s.n = n;
  s.label = std::move(label);
  return node(std::move(s));
}

NodeP mk_interrupt(NodeP l, NodeP r) {
  if (is_skip(l) || is_skip(r)) return skip_node();
  return mk_binary(K::Interrupt, std::move(l), std::move(r));
}

NodeP mk_scope(std::vector<VarDecl> decls, std::vector<std::optional<Value>> saved, NodeP body, Ctx& c) {
  if (is_skip(body)) {
    for (std::size_t i = 0; i < decls.size(); ++i) {
      if (saved[i]) (*c.store)[decls[i].name] = *saved[i];
      else c.store->erase(decls[i].name);
    }
    return body;
  }
  auto s = blank(K::Scope);
  s.decls = std::move(decls);
  s.saved = std::move(saved);
  s.l = std::move(body);
  return node(std::move(s));
}

NodeP mk_leaf(std::string label, Store store, std::shared_ptr<const Defs> defs, NodeP body) {
  if (is_skip(body)) return body;
  auto s = blank(K::Leaf);
  s.label = std::move(label);
  s.store = std::make_shared<const Store>(std::move(store));
  s.defs = std::move(defs);
  s.l = std::move(body);
  return node(std::move(s));
}

NodeP raw_act(const ActionPtr& a) {
  auto s = blank(K::Act);
  s.act = a;
  return node(std::move(s));
}

// Settles an action: performs assignments, unfolds recursion and calls,
// enters variable blocks and resolves deterministic guards, stopping at
// the first communication, delay or internal choice.
NodeP act(const ActionPtr& a, Ctx& c) {
  if (++c.unfoldings > c.net->options.max_unfoldings)
    throw SimError("unguarded recursion: unfolding limit reached");
  return std::visit(
      [&](const auto& x) -> NodeP {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Action::Skip>) {
          return skip_node();
        } else if constexpr (std::is_same_v<T, Action::Stop>) {
          return stop_node();
        } else if constexpr (std::is_same_v<T, Action::Prefix> || std::is_same_v<T, Action::IntChoice>) {
          return raw_act(a);
        } else if constexpr (std::is_same_v<T, Action::ExtChoice>) {
          auto l = act(x.lhs, c);
          if (is_skip(l)) return l;
          return mk_ext(l, act(x.rhs, c));
        } else if constexpr (std::is_same_v<T, Action::Seq>) {
          return mk_seq(act(x.lhs, c), x.rhs, c);
        } else if constexpr (std::is_same_v<T, Action::Parallel>) {
          auto cs = eval_cs(x.cs, c);
          auto l = act(x.lhs, c);
          return mk_par(std::move(cs), l, act(x.rhs, c));
        } else if constexpr (std::is_same_v<T, Action::Interleave>) {
          auto l = act(x.lhs, c);
          return mk_inter(l, act(x.rhs, c));
        } else if constexpr (std::is_same_v<T, Action::Hide>) {
          return mk_hide(act(x.body, c), eval_cs(x.cs, c));
        } else if constexpr (std::is_same_v<T, Action::Mu>) {
          return act(substitute_recvar(x.body, x.var, a), c);
        } else if constexpr (std::is_same_v<T, Action::RecVar>) {
          throw SimError("free action variable " + x.name);
        } else if constexpr (std::is_same_v<T, Action::Call>) {
          if (!c.defs) throw SimError("action " + x.name + " outside a basic process");
          auto it = c.defs->find(x.name);
          if (it == c.defs->end()) throw SimError("undefined action " + x.name);
          return act(it->second, c);
        } else if constexpr (std::is_same_v<T, Action::Wait>) {
          return mk_wait(eval_time(x.duration, c));
        } else if constexpr (std::is_same_v<T, Action::WaitRange>) {
          auto lo = eval_time(x.lo, c);
          auto hi = eval_time(x.hi, c);
          if (lo == hi) return mk_wait(lo);
          return raw_act(a);
        } else if constexpr (std::is_same_v<T, Action::Deadline>) {
          auto d = eval_time(x.d, c);
          return mk_budget(K::Deadline, act(x.body, c), d, "endby " + pretty_print(x.d));
        } else if constexpr (std::is_same_v<T, Action::StartBy>) {
          auto d = eval_time(x.d, c);
          return mk_budget(K::StartBy, act(x.body, c), d, "startby " + pretty_print(x.d));
        } else if constexpr (std::is_same_v<T, Action::Interrupt>) {
          auto l = act(x.lhs, c);
          if (is_skip(l)) return l;
          return mk_interrupt(l, act(x.rhs, c));
        } else if constexpr (std::is_same_v<T, Action::Assign>) {
          if (!c.store || !c.store->count(x.var)) throw SimError("assignment to undeclared variable " + x.var);
          (*c.store)[x.var] = eval(x.value, c);
          return skip_node();
        } else if constexpr (std::is_same_v<T, Action::VarBlock>) {
          if (!c.store) throw SimError("variable block outside a basic process");
          std::vector<std::optional<Value>> saved;
          for (const auto& d : x.decls) {
            auto it = c.store->find(d.name);
            saved.push_back(it == c.store->end() ? std::nullopt : std::optional<Value>(it->second));
            (*c.store)[d.name] = Value::default_for(d.sort);
          }
          return mk_scope(x.decls, std::move(saved), act(x.body, c), c);
        } else if constexpr (std::is_same_v<T, Action::Guarded>) {
          std::vector<ActionPtr> open;
          for (const auto& b : x.branches)
            if (as_bool(eval(b.guard, c))) open.push_back(b.body);
          if (open.empty()) return stop_node();
          if (open.size() == 1) return act(open.front(), c);
          return raw_act(a);
        } else if constexpr (std::is_same_v<T, Action::Alloc>) {
          return skip_node();
        } else {
          throw SimError("placeholder in simulated action");
        }
      },
      a->node);
}

// ---------------------------------------------------------------------------
// Transitions

struct Label {
  bool internal = false;
  std::string channel;  // empty for internal choices
  std::vector<std::optional<Value>> fields;
};

using Apply = std::function<NodeP(const std::vector<Value>&, Ctx&)>;

struct Tr {
  Label lab;
  std::string via;
  Apply apply;
};

std::vector<Value> concrete(const Label& l) {
  std::vector<Value> v;
  for (const auto& f : l.fields) v.push_back(*f);
  return v;
}

// Expands open fields at the given positions over their sort domains.
std::vector<Label> expand(const Label& l, const Network& net, std::size_t upto) {
  std::vector<Label> out = {l};
  if (l.channel.empty()) return out;
  const auto& sorts = net.sorts(l.channel);
  for (std::size_t i = 0; i < l.fields.size() && i < upto; ++i) {
    if (l.fields[i]) continue;
    std::vector<Label> next;
    for (const auto& partial : out)
      for (const auto& v : net.domain(sorts.at(i))) {
        auto p = partial;
        p.fields[i] = v;
        next.push_back(std::move(p));
      }
    out = std::move(next);
  }
  return out;
}

std::size_t prefix_reach(const std::vector<ChanPat>& cs, const std::string& channel) {
  std::size_t n = 0;
  for (const auto& p : cs)
    if (p.channel == channel) n = std::max(n, p.prefix.size());
  return n;
}

// Requires the fields covered by a matching prefix to be concrete.
bool in_cs(const std::vector<ChanPat>& cs, const Label& l) {
  for (const auto& p : cs) {
    if (p.channel != l.channel || p.prefix.size() > l.fields.size()) continue;
    bool match = true;
    for (std::size_t i = 0; i < p.prefix.size() && match; ++i) match = l.fields[i] && *l.fields[i] == p.prefix[i];
    if (match) return true;
  }
  return false;
}

std::vector<Tr> split(const std::vector<Tr>& trs, const std::vector<ChanPat>& cs, const Network& net) {
  std::vector<Tr> out;
  for (const auto& t : trs) {
    if (t.lab.internal) {
      out.push_back(t);
      continue;
    }
    for (auto& l : expand(t.lab, net, prefix_reach(cs, t.lab.channel))) out.push_back({l, t.via, t.apply});
  }
  return out;
}

std::optional<Label> unify(const Label& a, const Label& b) {
  if (a.channel != b.channel || a.fields.size() != b.fields.size()) return std::nullopt;
  Label r = a;
  for (std::size_t i = 0; i < a.fields.size(); ++i) {
    if (a.fields[i] && b.fields[i]) {
      if (*a.fields[i] != *b.fields[i]) return std::nullopt;
    } else if (!a.fields[i]) {
      r.fields[i] = b.fields[i];
    }
  }
  return r;
}

template <typename F>
std::vector<Tr> wrap(std::vector<Tr> trs, const std::string& tag, F rebuild) {
  for (auto& t : trs) {
    auto inner = std::move(t.apply);
    t.apply = [inner, rebuild](const std::vector<Value>& v, Ctx& c) { return rebuild(inner(v, c), c); };
    t.via = tag + t.via;
  }
  return trs;
}

std::vector<Tr> trans(const NodeP& n, const Ctx& c);

std::vector<Tr> trans_act(const NodeP& n, const Ctx& c) {
  const auto& a = n->act;
  std::vector<Tr> out;
  if (auto* p = std::get_if<Action::Prefix>(&a->node)) {
    const auto& sorts = c.net->sorts(p->channel);
    if (sorts.size() != p->fields.size())
      throw SimError("channel " + p->channel + " used with the wrong number of fields");
    Label lab{false, p->channel, {}};
    for (const auto& f : p->fields)
      lab.fields.push_back(f.kind == CommField::Kind::Input ? std::nullopt : std::optional<Value>(eval(f.expr, c)));
    out.push_back({lab, "", [a](const std::vector<Value>& v, Ctx& cx) {
                     const auto& pf = std::get<Action::Prefix>(a->node);
                     Bindings b;
                     for (std::size_t i = 0; i < pf.fields.size(); ++i)
                       if (pf.fields[i].kind == CommField::Kind::Input) b[pf.fields[i].var] = expr_of_value(v[i]);
                     return act(b.empty() ? pf.cont : substitute_names(pf.cont, b), cx);
                   }});
  } else if (auto* ic = std::get_if<Action::IntChoice>(&a->node)) {
    auto l = ic->lhs, r = ic->rhs;
    out.push_back({{true, "", {}}, "<", [l](const std::vector<Value>&, Ctx& cx) { return act(l, cx); }});
    out.push_back({{true, "", {}}, ">", [r](const std::vector<Value>&, Ctx& cx) { return act(r, cx); }});
  } else if (auto* wr = std::get_if<Action::WaitRange>(&a->node)) {
    auto lo = eval_time(wr->lo, c), hi = eval_time(wr->hi, c);
    for (auto k = lo; k <= hi; ++k)
      out.push_back({{true, "", {}}, "w" + std::to_string(k),
                     [k](const std::vector<Value>&, Ctx&) { return mk_wait(k); }});
  } else if (auto* g = std::get_if<Action::Guarded>(&a->node)) {
    for (std::size_t i = 0; i < g->branches.size(); ++i) {
      if (!as_bool(eval(g->branches[i].guard, c))) continue;
      auto body = g->branches[i].body;
      out.push_back({{true, "", {}}, "g" + std::to_string(i),
                     [body](const std::vector<Value>&, Ctx& cx) { return act(body, cx); }});
    }
  }
  return out;
}

std::vector<Tr> trans(const NodeP& n, const Ctx& c) {
  switch (n->k) {
    case K::Skip:
    case K::Stop:
    case K::Wait:
      return {};
    case K::Act:
      return trans_act(n, c);
    case K::Seq: {
      auto r = n->act;
      return wrap(trans(n->l, c), "", [r](NodeP l, Ctx& cx) { return mk_seq(std::move(l), r, cx); });
    }
    case K::Ext: {
      auto l = n->l, r = n->r;
      std::vector<Tr> out;
      for (auto& t : trans(l, c)) {
        auto inner = t.apply;
        bool internal = t.lab.internal;
        out.push_back({t.lab, "L" + t.via, [inner, internal, r](const std::vector<Value>& v, Ctx& cx) {
                         auto l2 = inner(v, cx);
                         return internal ? mk_ext(l2, r) : l2;
                       }});
      }
      for (auto& t : trans(r, c)) {
        auto inner = t.apply;
        bool internal = t.lab.internal;
        out.push_back({t.lab, "R" + t.via, [inner, internal, l](const std::vector<Value>& v, Ctx& cx) {
                         auto r2 = inner(v, cx);
                         return internal ? mk_ext(l, r2) : r2;
                       }});
      }
      return out;
    }
    case K::Par:
    case K::Inter: {
      bool par = n->k == K::Par;
      auto cs = n->cs;
      auto l = n->l, r = n->r;
      auto rebuild = [par, cs](NodeP a, NodeP b) {
        return par ? mk_par(cs, std::move(a), std::move(b)) : mk_inter(std::move(a), std::move(b));
      };
      auto lt = split(trans(l, c), cs, *c.net);
      auto rt = split(trans(r, c), cs, *c.net);
      std::vector<Tr> out;
      for (auto& t : lt) {
        if (!t.lab.internal && par && in_cs(cs, t.lab)) continue;
        auto inner = t.apply;
        out.push_back({t.lab, "L" + t.via, [inner, r, rebuild](const std::vector<Value>& v, Ctx& cx) {
                         return rebuild(inner(v, cx), r);
                       }});
      }
      for (auto& t : rt) {
        if (!t.lab.internal && par && in_cs(cs, t.lab)) continue;
        auto inner = t.apply;
        out.push_back({t.lab, "R" + t.via, [inner, l, rebuild](const std::vector<Value>& v, Ctx& cx) {
                         return rebuild(l, inner(v, cx));
                       }});
      }
      if (par) {
        for (auto& a : lt) {
          if (a.lab.internal || !in_cs(cs, a.lab)) continue;
          for (auto& b : rt) {
            if (b.lab.internal || !in_cs(cs, b.lab)) continue;
            auto u = unify(a.lab, b.lab);
            if (!u) continue;
            auto fa = a.apply, fb = b.apply;
            out.push_back({*u, "(" + a.via + "|" + b.via + ")",
                           [fa, fb, rebuild](const std::vector<Value>& v, Ctx& cx) {
                             auto l2 = fa(v, cx);
                             auto r2 = fb(v, cx);
                             return rebuild(l2, r2);
                           }});
          }
        }
      }
      return out;
    }
    case K::Hide: {
      auto cs = n->cs;
      std::vector<Tr> out;
      for (auto& t : split(trans(n->l, c), cs, *c.net)) {
        auto inner = t.apply;
        auto apply = [inner, cs](const std::vector<Value>& v, Ctx& cx) { return mk_hide(inner(v, cx), cs); };
        if (!t.lab.internal && in_cs(cs, t.lab)) {
          for (auto& l : expand(t.lab, *c.net, t.lab.fields.size())) {
            l.internal = true;
            out.push_back({l, "H" + t.via, apply});
          }
        } else {
          out.push_back({t.lab, "H" + t.via, apply});
        }
      }
      return out;
    }
    case K::Deadline: {
      auto budget = n->n;
      auto label = n->label;
      return wrap(trans(n->l, c), "D", [budget, label](NodeP b, Ctx&) {
        return mk_budget(K::Deadline, std::move(b), budget, label);
      });
    }
    case K::StartBy: {
      auto budget = n->n;
      auto label = n->label;
      std::vector<Tr> out;
      for (auto& t : trans(n->l, c)) {
        auto inner = t.apply;
        bool internal = t.lab.internal;
        out.push_back({t.lab, "B" + t.via, [inner, internal, budget, label](const std::vector<Value>& v, Ctx& cx) {
                         auto b = inner(v, cx);
                         return internal ? mk_budget(K::StartBy, b, budget, label) : b;
                       }});
      }
      return out;
    }
    case K::Interrupt: {
      auto l = n->l, r = n->r;
      auto out = wrap(trans(l, c), "L", [r](NodeP l2, Ctx&) { return mk_interrupt(std::move(l2), r); });
      for (auto& t : trans(r, c)) {
        auto inner = t.apply;
        bool internal = t.lab.internal;
        out.push_back({t.lab, "R" + t.via, [inner, internal, l](const std::vector<Value>& v, Ctx& cx) {
                         auto r2 = inner(v, cx);
                         return internal ? mk_interrupt(l, r2) : r2;
                       }});
      }
      return out;
    }
    case K::Scope: {
      auto decls = n->decls;
      auto saved = n->saved;
      return wrap(trans(n->l, c), "S", [decls, saved](NodeP b, Ctx& cx) {
        return mk_scope(decls, saved, std::move(b), cx);
      });
    }
    case K::Leaf: {
      Ctx inner{c.net, const_cast<Store*>(n->store.get()), n->defs.get()};
      auto trs = trans(n->l, inner);
      for (auto& t : trs) {
        auto f = std::move(t.apply);
        auto leaf = n;
        t.apply = [f, leaf](const std::vector<Value>& v, Ctx& cx) {
          Store s = *leaf->store;
          Ctx lc{cx.net, &s, leaf->defs.get()};
          auto body = f(v, lc);
          return mk_leaf(leaf->label, std::move(s), leaf->defs, body);
        };
        t.via = "{" + n->label + "}" + t.via;
      }
      return trs;
    }
  }
  return {};
}

// Successor after one time unit, or null when an expired obligation blocks
// time. Obligations under `frozen` neither run nor block.
NodeP tock(const NodeP& n, Ctx& c, bool frozen = false) {
  switch (n->k) {
    case K::Skip:
    case K::Stop:
    case K::Act:
      return n;
    case K::Wait:
      return mk_wait(n->n - 1);
    case K::Seq: {
      auto l = tock(n->l, c, frozen);
      return l ? mk_seq(l, n->act, c) : nullptr;
    }
    case K::Ext:
    case K::Par:
    case K::Inter:
    case K::Interrupt: {
      bool f = frozen || (n->k == K::Ext && c.net->options.dormant_choice_obligations);
      auto l = tock(n->l, c, f);
      if (!l) return nullptr;
      auto r = tock(n->r, c, f);
      if (!r) return nullptr;
      if (n->k == K::Ext) return mk_ext(l, r);
      if (n->k == K::Par) return mk_par(n->cs, l, r);
      if (n->k == K::Inter) return mk_inter(l, r);
      return mk_interrupt(l, r);
    }
    case K::Hide: {
      auto b = tock(n->l, c, frozen);
      return b ? mk_hide(b, n->cs) : nullptr;
    }
    case K::Deadline:
    case K::StartBy: {
      if (frozen) {
        auto b = tock(n->l, c, frozen);
        return b ? mk_budget(n->k, b, n->n, n->label) : nullptr;
      }
      if (n->n <= 0) return nullptr;
      auto b = tock(n->l, c, frozen);
      return b ? mk_budget(n->k, b, n->n - 1, n->label) : nullptr;
    }
    case K::Scope: {
      auto b = tock(n->l, c, frozen);
      return b ? mk_scope(n->decls, n->saved, b, c) : nullptr;
    }
    case K::Leaf: {
      Store s = *n->store;
      Ctx lc{c.net, &s, n->defs.get()};
      auto b = tock(n->l, lc, frozen);
      return b ? mk_leaf(n->label, std::move(s), n->defs, b) : nullptr;
    }
  }
  return nullptr;
}

void collect_obligations(const NodeP& n, const std::string& component, bool dormant,
                         std::vector<Obligation>& out) {
  switch (n->k) {
    case K::Deadline:
    case K::StartBy:
      out.push_back({component, n->label, n->n});
      collect_obligations(n->l, component, dormant, out);
      return;
    case K::Seq:
    case K::Hide:
    case K::Scope:
      collect_obligations(n->l, component, dormant, out);
      return;
    case K::Ext:
      if (dormant) return;
      [[fallthrough]];
    case K::Par:
    case K::Inter:
    case K::Interrupt:
      collect_obligations(n->l, component, dormant, out);
      collect_obligations(n->r, component, dormant, out);
      return;
    case K::Leaf:
      collect_obligations(n->l, n->label, dormant, out);
      return;
    default:
      return;
  }
}

std::string values_key(const std::vector<ChanPat>& cs) {
  std::string s;
  for (const auto& p : cs) {
    s += p.channel;
    for (const auto& v : p.prefix) s += "." + to_string(v);
    s += ",";
  }
  return s;
}

const std::string& node_key(const NodeP& n) {
  if (!n->key_cache.empty()) return n->key_cache;
  std::string k;
  switch (n->k) {
    case K::Act: k = "A[" + pretty_print(n->act) + "]"; break;
    case K::Skip: k = "Skip"; break;
    case K::Stop: k = "Stop"; break;
    case K::Seq: k = "Q(" + node_key(n->l) + ";" + pretty_print(n->act) + ")"; break;
    case K::Ext: k = "E(" + node_key(n->l) + "|" + node_key(n->r) + ")"; break;
    case K::Par: k = "P{" + values_key(n->cs) + "}(" + node_key(n->l) + "|" + node_key(n->r) + ")"; break;
    case K::Inter: k = "I(" + node_key(n->l) + "|" + node_key(n->r) + ")"; break;
    case K::Hide: k = "H{" + values_key(n->cs) + "}(" + node_key(n->l) + ")"; break;
    case K::Wait: k = "W" + std::to_string(n->n); break;
    case K::Deadline: k = "D" + std::to_string(n->n) + "(" + node_key(n->l) + ")"; break;
    case K::StartBy: k = "B" + std::to_string(n->n) + "(" + node_key(n->l) + ")"; break;
    case K::Interrupt: k = "T(" + node_key(n->l) + "|" + node_key(n->r) + ")"; break;
    case K::Scope: {
      k = "S[";
      for (std::size_t i = 0; i < n->decls.size(); ++i)
        k += n->decls[i].name + "=" + (n->saved[i] ? to_string(*n->saved[i]) : "-") + ",";
      k += "](" + node_key(n->l) + ")";
      break;
    }
    case K::Leaf: {
      k = "L<" + n->label + ">[";
      for (const auto& [name, v] : *n->store) k += name + "=" + to_string(v) + ",";
      k += "](" + node_key(n->l) + ")";
      break;
    }
  }
  n->key_cache = std::move(k);
  return n->key_cache;
}

}  // namespace

std::strong_ordering Event::operator<=>(const Event& o) const {
  if (auto c = kind <=> o.kind; c != 0) return c;
  if (auto c = channel <=> o.channel; c != 0) return c;
  return payload <=> o.payload;
}

std::string to_string(const Event& e) {
  switch (e.kind) {
    case Event::Kind::Tick: return "tock";
    case Event::Kind::Internal:
    case Event::Kind::Visible: {
      std::string s = e.channel;
      for (const auto& v : e.payload) s += "." + to_string(v);
      if (e.kind == Event::Kind::Visible) return s;
      return s.empty() ? "tau" : "tau(" + s + ")";
    }
  }
  return "?";
}

std::string to_string(const Trace& t) {
  std::string s = "<";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? ", " : "") + to_string(t[i]);
  return s + ">";
}

std::string to_string(const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::Ok: return "ok @t" + std::to_string(v.clock);
    case Verdict::Kind::DeadlineViolation:
      return "deadline_violation " + v.component + " " + v.op + " @t" + std::to_string(v.clock);
    case Verdict::Kind::Deadlock: return "deadlock @t" + std::to_string(v.clock);
    case Verdict::Kind::DepthExhausted: return "depth_exhausted @t" + std::to_string(v.clock);
  }
  return "?";
}

std::string Config::key() const { return node_key(term); }

bool Config::terminated() const { return term->k == K::Skip; }

std::vector<Obligation> obligations(const Config& c) {
  std::vector<Obligation> out;
  collect_obligations(c.term, "", c.network->options.dormant_choice_obligations, out);
  return out;
}

namespace {

NodeP build(const ProcessPtr& p, const std::string& label, const Network& net, int depth);

NodeP build_named(const std::string& name, const std::vector<ExprPtr>& args, const Network& net, int depth) {
  auto it = net.processes.find(name);
  if (it == net.processes.end()) throw SimError("unknown process " + name);
  const auto& body = it->second;
  auto* param = std::get_if<Process::Param>(&body->node);
  if (!param) {
    if (!args.empty()) throw SimError("process " + name + " takes no arguments");
    return build(body, name, net, depth + 1);
  }
  if (param->params.size() != args.size())
    throw SimError("process " + name + " expects " + std::to_string(param->params.size()) + " arguments");
  Ctx c{&net};
  Bindings b;
  std::string label = name + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    auto v = eval(args[i], c);
    b[param->params[i].name] = expr_of_value(v);
    label += (i ? ", " : "") + to_string(v);
  }
  label += ")";
  return build(substitute_names(param->body, b), label, net, depth + 1);
}

NodeP build(const ProcessPtr& p, const std::string& label, const Network& net, int depth) {
  if (depth > 100) throw SimError("process definitions nest too deeply (recursive process?)");
  Ctx c{&net};
  return std::visit(
      [&](const auto& x) -> NodeP {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Process::Basic>) {
          Store store;
          for (const auto& v : x.state) store[v.name] = Value::default_for(v.sort);
          auto defs = std::make_shared<Defs>();
          for (const auto& d : x.actions) (*defs)[d.name] = d.body;
          Ctx lc{&net, &store, defs.get()};
          auto body = act(x.main, lc);
          return mk_leaf(label, std::move(store), defs, body);
        } else if constexpr (std::is_same_v<T, Process::Par>) {
          auto l = build(x.lhs, label, net, depth + 1);
          return mk_par(eval_cs(x.cs, c), l, build(x.rhs, label, net, depth + 1));
        } else if constexpr (std::is_same_v<T, Process::Interleave>) {
          auto l = build(x.lhs, label, net, depth + 1);
          return mk_inter(l, build(x.rhs, label, net, depth + 1));
        } else if constexpr (std::is_same_v<T, Process::Hide>) {
          return mk_hide(build(x.body, label, net, depth + 1), eval_cs(x.cs, c));
        } else if constexpr (std::is_same_v<T, Process::Param>) {
          throw SimError("parameterised process " + label + " used without arguments");
        } else if constexpr (std::is_same_v<T, Process::Inst>) {
          return build_named(x.name, x.args, net, depth);
        } else {
          return build_named(x.name, {}, net, depth);
        }
      },
      p->node);
}

void add_channels(Network& net, const std::vector<ChannelDecl>& decls) {
  for (const auto& d : decls)
    for (const auto& n : d.names) net.channels[n] = d.sorts;
}

std::optional<Obligation> expired(const Config& c) {
  for (const auto& o : obligations(c))
    if (o.budget <= 0) return o;
  return std::nullopt;
}

Verdict violation_or_deadlock(const Config& c) {
  if (auto o = expired(c)) return {Verdict::Kind::DeadlineViolation, o->component, o->op, c.clock};
  return {Verdict::Kind::Deadlock, {}, {}, c.clock};
}

}  // namespace

Config make_config(const CircusProgram& program, const std::string& main, const ConstBindings& consts,
                   const SimOptions& options) {
  auto net = std::make_shared<Network>();
  net->options = options;
  std::vector<ChannelDecl> channels;
  for (const auto& para : program) {
    if (auto* c = std::get_if<ChannelDecl>(&para)) channels.push_back(*c);
    if (auto* i = std::get_if<IdsDecl>(&para)) net->ids.insert(net->ids.end(), i->names.begin(), i->names.end());
    if (auto* k = std::get_if<ConstDecl>(&para)) {
      for (const auto& n : k->names) {
        auto it = consts.find(n);
        if (it == consts.end()) throw SimError("constant " + n + " is not bound");
        net->consts[n] = it->second;
      }
    }
    if (auto* p = std::get_if<ProcessDecl>(&para)) net->processes[p->name] = p->body;
  }
  add_channels(*net, channels);
  auto term = build_named(main, {}, *net, 0);
  return Config{net, term, 0};
}

Config make_action_config(const ActionPtr& action, const std::vector<ChannelDecl>& channels,
                          const std::vector<VarDecl>& state, const ConstBindings& consts,
                          const std::vector<std::string>& ids, const SimOptions& options) {
  auto net = std::make_shared<Network>();
  net->options = options;
  net->consts = consts;
  net->ids = ids;
  add_channels(*net, channels);
  Store store;
  for (const auto& v : state) store[v.name] = Value::default_for(v.sort);
  auto defs = std::make_shared<Defs>();
  Ctx c{net.get(), &store, defs.get()};
  auto body = act(action, c);
  return Config{net, mk_leaf("main", std::move(store), defs, body), 0};
}

std::vector<std::pair<Event, Config>> successors(const Config& c) {
  std::vector<std::pair<Event, Config>> out;
  Ctx top{c.network.get()};
  bool internal = false;
  for (const auto& t : trans(c.term, top)) {
    for (const auto& lab : expand(t.lab, *c.network, t.lab.fields.size())) {
      Event e{lab.internal ? Event::Kind::Internal : Event::Kind::Visible, lab.channel, concrete(lab), t.via};
      Ctx ac{c.network.get()};
      auto next = t.apply(e.payload, ac);
      out.emplace_back(std::move(e), Config{c.network, std::move(next), c.clock});
      internal = internal || lab.internal;
    }
  }
  if (!internal) {
    Ctx tc{c.network.get()};
    if (auto next = tock(c.term, tc)) out.emplace_back(Event::tick(), Config{c.network, next, c.clock + 1});
  }
  return out;
}

std::vector<Event> enabled(const Config& c) {
  std::vector<Event> out;
  Ctx top{c.network.get()};
  bool internal = false;
  for (const auto& t : trans(c.term, top))
    for (const auto& lab : expand(t.lab, *c.network, t.lab.fields.size())) {
      out.push_back({lab.internal ? Event::Kind::Internal : Event::Kind::Visible, lab.channel, concrete(lab), t.via});
      internal = internal || lab.internal;
    }
  if (!internal) {
    Ctx tc{c.network.get()};
    if (tock(c.term, tc)) out.push_back(Event::tick());
  }
  return out;
}

Config step(const Config& c, const Event& e) {
  if (e.kind == Event::Kind::Tick) {
    for (const auto& ev : enabled(c))
      if (ev.kind == Event::Kind::Tick) {
        Ctx tc{c.network.get()};
        return Config{c.network, tock(c.term, tc), c.clock + 1};
      }
    throw IllegalStep("tock is not enabled");
  }
  Ctx top{c.network.get()};
  for (const auto& t : trans(c.term, top)) {
    if (t.lab.internal != (e.kind == Event::Kind::Internal) || t.lab.channel != e.channel) continue;
    if (!e.via.empty() && t.via != e.via) continue;
    if (t.lab.fields.size() != e.payload.size()) continue;
    bool match = true;
    for (std::size_t i = 0; i < e.payload.size() && match; ++i)
      match = !t.lab.fields[i] || *t.lab.fields[i] == e.payload[i];
    if (!match) continue;
    Ctx ac{c.network.get()};
    return Config{c.network, t.apply(e.payload, ac), c.clock};
  }
  throw IllegalStep(to_string(e) + " is not enabled");
}

RunResult run(const Config& c0, const Policy& policy, std::int64_t max_ticks, std::size_t max_steps) {
  RunResult res{{}, {}, c0};
  std::mt19937_64 rng(policy.seed);
  Config c = c0;
  for (std::size_t steps = 0;; ++steps) {
    if (c.terminated() || c.clock >= max_ticks) {
      res.verdict = {Verdict::Kind::Ok, {}, {}, c.clock};
      break;
    }
    if (steps >= max_steps) {
      res.verdict = {Verdict::Kind::DepthExhausted, {}, {}, c.clock};
      break;
    }
    auto succ = successors(c);
    if (succ.empty()) {
      res.verdict = violation_or_deadlock(c);
      break;
    }
    if (succ.size() == 1 && succ[0].first.kind == Event::Kind::Tick && succ[0].second.key() == c.key()) {
      res.verdict = {Verdict::Kind::Deadlock, {}, {}, c.clock};
      break;
    }
    std::optional<std::size_t> pick;
    if (policy.kind == Policy::Kind::Random) {
      for (auto kind : {Event::Kind::Internal, Event::Kind::Visible, Event::Kind::Tick}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < succ.size(); ++i)
          if (succ[i].first.kind == kind) idx.push_back(i);
        if (!idx.empty()) {
          pick = idx[rng() % idx.size()];
          break;
        }
      }
    } else {
      for (const auto& name : policy.priority) {
        for (std::size_t i = 0; i < succ.size() && !pick; ++i) {
          const auto& e = succ[i].first;
          bool hit = (name == "tock" && e.kind == Event::Kind::Tick) ||
                     (name == "tau" && e.kind == Event::Kind::Internal) ||
                     (e.kind != Event::Kind::Tick && e.channel == name);
          if (hit) pick = i;
        }
        if (pick) break;
      }
    }
    if (!pick) {
      res.verdict = {Verdict::Kind::Deadlock, {}, {}, c.clock};
      break;
    }
    auto& [e, next] = succ[*pick];
    if (e.kind == Event::Kind::Visible) res.trace.push_back({c.clock, e});
    c = std::move(next);
  }
  res.final = c;
  return res;
}

TraceSet enumerate_traces(const Config& c0, std::size_t depth, const EnumOptions& options) {
  TraceSet out;
  out.traces.insert(Trace{});
  std::map<Trace, std::map<std::string, Config>> frontier;
  frontier[{}].emplace(c0.key(), c0);
  std::size_t states = 0;
  for (std::size_t level = 0; level < depth && !frontier.empty(); ++level) {
    std::map<Trace, std::map<std::string, Config>> next;
    for (auto& [trace, configs] : frontier) {
      std::deque<Config> work;
      std::unordered_set<std::string> seen;
      for (auto& [k, c] : configs) {
        seen.insert(k);
        work.push_back(c);
      }
      while (!work.empty()) {
        auto c = std::move(work.front());
        work.pop_front();
        if (++states > options.state_cap) {
          out.partial = true;
          return out;
        }
        for (auto& [e, s] : successors(c)) {
          bool tick = e.kind == Event::Kind::Tick;
          if (tick && options.ticks == TickMode::Disabled) continue;
          if (e.kind == Event::Kind::Internal || (tick && options.ticks == TickMode::Elided)) {
            auto k = s.key();
            if (seen.insert(k).second) work.push_back(std::move(s));
            continue;
          }
          Trace t = trace;
          Event clean = e;
          clean.via.clear();
          t.push_back(std::move(clean));
          out.traces.insert(t);
          auto k = s.key();
          next[std::move(t)].emplace(std::move(k), std::move(s));
        }
      }
    }
    frontier = std::move(next);
  }
  return out;
}

ExploreResult explore(const Config& c0, std::int64_t max_ticks, std::size_t state_cap) {
  struct Item {
    Config c;
    std::ptrdiff_t parent;
    Event via;
  };
  ExploreResult res;
  std::vector<Item> items;
  std::unordered_set<std::string> seen;
  auto state_key = [](const Config& c) { return c.key() + "@" + std::to_string(c.clock); };
  items.push_back({c0, -1, {}});
  seen.insert(state_key(c0));
  auto witness = [&](std::size_t i) {
    Trace t;
    for (auto j = static_cast<std::ptrdiff_t>(i); items[j].parent >= 0; j = items[j].parent)
      if (items[j].via.kind != Event::Kind::Internal) {
        Event e = items[j].via;
        e.via.clear();
        t.push_back(e);
      }
    std::reverse(t.begin(), t.end());
    return t;
  };
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items.size() > state_cap) {
      res.verdict = {Verdict::Kind::DepthExhausted, {}, {}, items[i].c.clock};
      res.states = items.size();
      return res;
    }
    auto c = items[i].c;
    if (c.terminated()) continue;
    auto succ = successors(c);
    if (succ.empty()) {
      auto v = violation_or_deadlock(c);
      if (v.kind == Verdict::Kind::DeadlineViolation) {
        res.verdict = v;
        res.witness = witness(i);
        res.states = items.size();
        return res;
      }
      continue;
    }
    for (auto& [e, s] : succ) {
      if (s.clock > max_ticks) continue;
      if (seen.insert(state_key(s)).second) items.push_back({std::move(s), static_cast<std::ptrdiff_t>(i), e});
    }
  }
  res.verdict = {Verdict::Kind::Ok, {}, {}, max_ticks};
  res.states = items.size();
  return res;
}

}  // namespace scjc
