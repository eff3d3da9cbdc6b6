#include "scjc/refine.hpp"

#include <algorithm>

#include "scjc/analysis.hpp"
#include "scjc/frameworks.hpp"
#include "scjc/translate.hpp"

namespace scjc {

std::string ProvisoViolation::describe(const std::string& p, const std::set<std::string>& names) {
  std::string s = "proviso violated: " + p;
  if (!names.empty()) {
    s += " (";
    bool first = true;
    for (const auto& n : names) {
      s += (first ? "" : ", ") + n;
      first = false;
    }
    s += ")";
  }
  return s;
}

namespace {

std::vector<ActionPtr> children(const ActionPtr& a) {
  return std::visit(
      [](const auto& x) -> std::vector<ActionPtr> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Action::Prefix>) {
          return {x.cont};
        } else if constexpr (std::is_same_v<T, Action::ExtChoice> || std::is_same_v<T, Action::IntChoice> ||
                             std::is_same_v<T, Action::Seq> || std::is_same_v<T, Action::Parallel> ||
                             std::is_same_v<T, Action::Interleave> || std::is_same_v<T, Action::Interrupt>) {
          return {x.lhs, x.rhs};
        } else if constexpr (std::is_same_v<T, Action::Hide> || std::is_same_v<T, Action::Mu> ||
                             std::is_same_v<T, Action::Deadline> || std::is_same_v<T, Action::StartBy> ||
                             std::is_same_v<T, Action::VarBlock>) {
          return {x.body};
        } else if constexpr (std::is_same_v<T, Action::Guarded>) {
          std::vector<ActionPtr> out;
          for (const auto& b : x.branches) out.push_back(b.body);
          return out;
        } else {
          return {};
        }
      },
      a->node);
}

ActionPtr with_child(const ActionPtr& a, std::size_t i, const ActionPtr& c) {
  Action::Node n = a->node;
  std::visit(
      [&](auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Action::Prefix>) {
          x.cont = c;
        } else if constexpr (std::is_same_v<T, Action::ExtChoice> || std::is_same_v<T, Action::IntChoice> ||
                             std::is_same_v<T, Action::Seq> || std::is_same_v<T, Action::Parallel> ||
                             std::is_same_v<T, Action::Interleave> || std::is_same_v<T, Action::Interrupt>) {
          (i == 0 ? x.lhs : x.rhs) = c;
        } else if constexpr (std::is_same_v<T, Action::Hide> || std::is_same_v<T, Action::Mu> ||
                             std::is_same_v<T, Action::Deadline> || std::is_same_v<T, Action::StartBy> ||
                             std::is_same_v<T, Action::VarBlock>) {
          x.body = c;
        } else if constexpr (std::is_same_v<T, Action::Guarded>) {
          x.branches.at(i).body = c;
        }
      },
      n);
  return make_action(std::move(n), a->span);
}

std::set<std::string> intersect(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::set<std::string> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

std::set<std::string> missing_from(const std::set<std::string>& needed, const NameSet& have) {
  std::set<std::string> out;
  for (const auto& n : needed)
    if (std::find(have.begin(), have.end(), n) == have.end()) out.insert(n);
  return out;
}

const Process::Basic& basic_of(const ProcessPtr& p) {
  auto* b = std::get_if<Process::Basic>(&p->node);
  if (!b) throw ShapeMismatch("law target must be a basic process");
  return *b;
}

ProcessPtr with_main(const ProcessPtr& p, ActionPtr main) {
  auto b = basic_of(p);
  b.main = std::move(main);
  return make_process(std::move(b), p->span);
}

bool same_fields(const std::vector<CommField>& a, const std::vector<CommField>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].kind != b[i].kind) return false;
    if (a[i].kind == CommField::Kind::Input ? a[i].var != b[i].var : !equal(a[i].expr, b[i].expr)) return false;
  }
  return true;
}

bool covers(const ChanSet& cs, const Action::Prefix& p) {
  for (const auto& ref : cs) {
    if (ref.channel != p.channel || ref.prefix.size() > p.fields.size()) continue;
    bool ok = true;
    for (std::size_t i = 0; i < ref.prefix.size() && ok; ++i)
      ok = p.fields[i].kind != CommField::Kind::Input && equal(ref.prefix[i], p.fields[i].expr);
    if (ok) return true;
  }
  return false;
}

}  // namespace

ActionPtr action_at(const ActionPtr& root, const ActionPath& path) {
  ActionPtr cur = root;
  for (auto i : path) {
    auto cs = children(cur);
    if (i >= cs.size()) throw ShapeMismatch("action path leaves the term");
    cur = cs[i];
  }
  return cur;
}

ActionPtr replace_at(const ActionPtr& root, const ActionPath& path, const ActionPtr& with) {
  if (path.empty()) return with;
  auto cs = children(root);
  if (path.front() >= cs.size()) throw ShapeMismatch("action path leaves the term");
  ActionPath rest(path.begin() + 1, path.end());
  return with_child(root, path.front(), replace_at(cs[path.front()], rest, with));
}

ActionPtr apply_law1(const ActionPtr& context, const ActionPtr& a, const std::string& c1, const std::string& c2,
                     NameSet ns1, NameSet ns2) {
  auto filled = substitute(context, a);
  auto vf = used_variables(context);
  auto va = used_variables(a);
  if (auto shared = intersect(vf, va); !shared.empty())
    throw ProvisoViolation("usedV(F) and usedV(A) are disjoint", shared);
  if (c1 == c2) throw ProvisoViolation("c1 and c2 are distinct", {c1});
  if (auto clash = intersect({c1, c2}, used_channels(filled)); !clash.empty())
    throw ProvisoViolation("c1 and c2 are not used in F(A)", clash);
  if (ns1.empty() && ns2.empty()) {
    ns1.assign(vf.begin(), vf.end());
    ns2.assign(va.begin(), va.end());
  }
  if (auto m = missing_from(vf, ns1); !m.empty()) throw ProvisoViolation("ns1 covers usedV(F)", m);
  if (auto m = missing_from(va, ns2); !m.empty()) throw ProvisoViolation("ns2 covers usedV(A)", m);
  if (auto shared = intersect({ns1.begin(), ns1.end()}, {ns2.begin(), ns2.end()}); !shared.empty())
    throw ProvisoViolation("ns1 and ns2 are disjoint", shared);

  auto signal = prefix(c1, {}, prefix(c2, {}, skip()));
  auto left = substitute(context, signal);
  auto right = seq(prefix(c1, {}, a), prefix(c2, {}, skip()));
  auto cs = chanset({c1, c2});
  return hide(parallel(ns1, cs, ns2, left, right), cs);
}

ProcessPtr apply_law1(const ProcessPtr& p, const ActionPtr& context, const ActionPtr& a, const std::string& c1,
                      const std::string& c2, NameSet ns1, NameSet ns2) {
  const auto& b = basic_of(p);
  if (!equal(b.main, substitute(context, a)))
    throw ShapeMismatch("main action is not the context filled with the action");
  if (auto clash = intersect({c1, c2}, used_channels(p)); !clash.empty())
    throw ProvisoViolation("c1 and c2 are not used in the process", clash);
  return with_main(p, apply_law1(context, a, c1, c2, std::move(ns1), std::move(ns2)));
}

ActionPtr apply_law2(const ActionPtr& target, const std::string& b, const ActionPtr& c) {
  auto* par = std::get_if<Action::Parallel>(&target->node);
  if (!par) throw ShapeMismatch("Law 2 applies to a parallel composition");
  auto* pl = std::get_if<Action::Prefix>(&par->lhs->node);
  auto* pr = std::get_if<Action::Prefix>(&par->rhs->node);
  if (!pl || !pr) throw ShapeMismatch("both operands of the parallel composition must be prefixes");
  if (pl->channel != pr->channel || !same_fields(pl->fields, pr->fields))
    throw ShapeMismatch("operands must start with the same communication");
  const auto& a = pl->channel;
  if (!covers(par->cs, *pl)) throw ProvisoViolation("a is in the synchronisation set", {a});
  auto used = used_channels(par->lhs);
  for (const auto& ch : used_channels(par->rhs)) used.insert(ch);
  if (used.count(b)) throw ProvisoViolation("b is not used in A or B", {b});

  auto cs = par->cs;
  cs.push_back({b, {}});
  auto rhs = ext_choice(par->rhs, prefix(b, {}, c));
  return parallel(par->ns1, cs, par->ns2, par->lhs, rhs);
}

ProcessPtr apply_law2(const ProcessPtr& p, const ActionPath& path, const std::string& b, const ActionPtr& c) {
  const auto& main = basic_of(p).main;
  return with_main(p, replace_at(main, path, apply_law2(action_at(main, path), b, c)));
}

RefinementResult check_bounded_refinement(const Config& spec, const Config& impl, std::size_t depth,
                                          const EnumOptions& options) {
  auto s = enumerate_traces(spec, depth, options);
  auto i = enumerate_traces(impl, depth, options);
  RefinementResult r;
  r.partial = s.partial || i.partial;
  for (const auto& t : i.traces) {
    if (s.traces.count(t)) continue;
    if (!r.counterexample || t.size() < r.counterexample->size()) r.counterexample = t;
  }
  r.holds = !r.counterexample;
  return r;
}

RefinementResult check_bounded_refinement(const CircusProgram& program, const std::string& spec,
                                          const std::string& impl, std::size_t depth,
                                          const ConstBindings& consts, const EnumOptions& options) {
  return check_bounded_refinement(make_config(program, spec, consts), make_config(program, impl, consts), depth,
                                  options);
}

RefinementResult check_bounded_refinement(const ActionPtr& spec, const ActionPtr& impl, std::size_t depth,
                                          const std::vector<ChannelDecl>& channels,
                                          const std::vector<VarDecl>& state, const EnumOptions& options) {
  std::map<std::string, std::size_t> arity;
  std::set<std::string> declared;
  for (const auto& d : channels)
    for (const auto& n : d.names) declared.insert(n);
  for (const auto& a : {spec, impl}) {
    for_each_action(a, [&](const Action& n) {
      if (auto* p = std::get_if<Action::Prefix>(&n.node)) arity.emplace(p->channel, p->fields.size());
    });
    for (const auto& ch : used_channels(a)) arity.emplace(ch, 0);
  }
  auto decls = channels;
  for (const auto& [name, n] : arity)
    if (!declared.count(name)) decls.push_back({{name}, std::vector<Sort>(n, Sort::Nat), {}});
  return check_bounded_refinement(make_action_config(spec, decls, state), make_action_config(impl, decls, state),
                                  depth, options);
}

namespace {

const Action::Prefix* as_prefix(const ActionPtr& a, const std::string& channel = {}) {
  auto* p = a ? std::get_if<Action::Prefix>(&a->node) : nullptr;
  if (p && !channel.empty() && p->channel != channel) return nullptr;
  return p;
}

// Call?x!cid -> Ret!x!cid -> Skip   or   Call?x!cid -> (BODY ; Ret!x!cid -> Skip)
ActionPtr unwrap_method(const ActionPtr& a, const std::string& call_ch, const std::string& ret_ch) {
  auto* p = as_prefix(a, call_ch);
  if (!p) throw ShapeMismatch("expected a " + call_ch + " method");
  if (as_prefix(p->cont, ret_ch)) return skip();
  if (auto* s = std::get_if<Action::Seq>(&p->cont->node); s && as_prefix(s->rhs, ret_ch)) return s->lhs;
  throw ShapeMismatch("method " + call_ch + " does not end with " + ret_ch);
}

// Call?x!cid -> var r: ID @ BODY ; Ret!x!cid!r -> Skip
std::pair<std::string, ActionPtr> unwrap_result_method(const ActionPtr& a, const std::string& call_ch,
                                                       const std::string& ret_ch) {
  auto* p = as_prefix(a, call_ch);
  auto* v = p ? std::get_if<Action::VarBlock>(&p->cont->node) : nullptr;
  auto* s = v && v->decls.size() == 1 ? std::get_if<Action::Seq>(&v->body->node) : nullptr;
  if (!s || !as_prefix(s->rhs, ret_ch)) throw ShapeMismatch("expected a " + call_ch + " result method");
  return {v->decls.front().name, s->lhs};
}

std::vector<ActionPtr> seq_leaves(const ActionPtr& a) {
  if (auto* s = std::get_if<Action::Seq>(&a->node)) {
    auto l = seq_leaves(s->lhs);
    for (auto& r : seq_leaves(s->rhs)) l.push_back(r);
    return l;
  }
  return {a};
}

TimeExpr time_of_expr(const ExprPtr& e) {
  if (auto* n = std::get_if<Expr::Num>(&e->node)) return TimeExpr::literal(n->value);
  if (auto* n = std::get_if<Expr::Name>(&e->node))
    return n->kind == NameKind::Constant ? TimeExpr::constant(n->text) : TimeExpr::variable(n->text);
  if (auto* b = std::get_if<Expr::Binary>(&e->node); b && b->op == BinOp::Add)
    return TimeExpr::sum(time_of_expr(b->lhs), time_of_expr(b->rhs));
  throw ShapeMismatch("start or period is not a time expression");
}

std::string name_text(const ExprPtr& e) {
  auto* n = e ? std::get_if<Expr::Name>(&e->node) : nullptr;
  if (!n) throw ShapeMismatch("expected an identifier constant");
  return n->text;
}

struct Composed {
  FrameworkKind kind;
  std::string name;
  const Process::Basic* app = nullptr;
};

struct AppView {
  const Process::Basic& b;
  std::string name;

  ActionPtr def(const std::string& n) const {
    for (const auto& d : b.actions)
      if (d.name == n) return d.body;
    return nullptr;
  }
  ActionPtr need(const std::string& n) const {
    auto d = def(n);
    if (!d) throw ShapeMismatch(name + "_App lacks action " + n);
    return d;
  }
  std::vector<MethodDef> aux(std::initializer_list<const char*> fixed) const {
    std::set<std::string> skip_names(fixed.begin(), fixed.end());
    skip_names.insert({"Methods", "Initial"});
    std::vector<MethodDef> out;
    for (const auto& d : b.actions) {
      if (skip_names.count(d.name)) continue;
      if (d.name.size() <= 4 || d.name.substr(d.name.size() - 4) != "Meth")
        throw ShapeMismatch(name + "_App has unexpected action " + d.name);
      auto m = d.name.substr(0, d.name.size() - 4);
      out.push_back({m, unwrap_method(d.body, m + "Call", m + "Ret"), {}});
    }
    return out;
  }
  std::optional<Initial> initial() const {
    auto d = def("Initial");
    if (!d) return std::nullopt;
    return Initial{{}, d};
  }
};

std::optional<Composed> composed_shape(const ProcessDecl& d, const std::set<std::string>& fw_names) {
  auto* h = std::get_if<Process::Hide>(&d.body->node);
  auto* par = h ? std::get_if<Process::Par>(&h->body->node) : nullptr;
  auto* inst = par ? std::get_if<Process::Inst>(&par->lhs->node) : nullptr;
  auto* ref = par ? std::get_if<Process::Ref>(&par->rhs->node) : nullptr;
  if (!inst || !ref || !fw_names.count(inst->name) || ref->name != d.name + "_App") return std::nullopt;
  if (inst->args.size() != 1 || name_text(inst->args[0]) != component_id(d.name)) return std::nullopt;
  for (auto k : all_framework_kinds())
    if (to_string(k) == inst->name) return Composed{k, d.name, nullptr};
  return std::nullopt;
}

}  // namespace

SCJProgram recognize(const CircusProgram& program) {
  std::set<std::string> fw_names;
  for (auto k : all_framework_kinds()) fw_names.insert(to_string(k));

  std::map<std::string, const Process::Basic*> procs;
  for (const auto& para : program)
    if (auto* d = std::get_if<ProcessDecl>(&para))
      if (auto* b = std::get_if<Process::Basic>(&d->body->node)) procs[d->name] = b;

  std::map<std::string, Composed> composed;
  std::map<std::string, std::string> by_id;
  for (const auto& para : program) {
    auto* d = std::get_if<ProcessDecl>(&para);
    if (!d) continue;
    auto c = composed_shape(*d, fw_names);
    if (!c) continue;
    auto it = procs.find(d->name + "_App");
    if (it == procs.end()) throw ShapeMismatch(d->name + "_App is missing or not a basic process");
    c->app = it->second;
    composed[d->name] = *c;
    by_id[component_id(d->name)] = d->name;
  }

  std::map<std::string, std::vector<Sort>> chan_sorts;
  for (const auto& para : program)
    if (auto* c = std::get_if<ChannelDecl>(&para))
      for (const auto& n : c->names) chan_sorts[n] = c->sorts;

  // Handlers first: missions need to know which of them take constructor arguments.
  std::map<std::string, SCJParagraph> out_para;
  std::map<std::string, std::size_t> init_arity;
  for (const auto& [name, c] : composed) {
    if (c.kind != FrameworkKind::PEHFW && c.kind != FrameworkKind::APEHFW) continue;
    AppView v{*c.app, name};
    std::optional<Initial> init;
    if (auto im = v.def("initialMeth")) {
      auto* p = as_prefix(im, init_call_channel(name));
      if (!p || p->fields.size() < 2) throw ShapeMismatch(name + " constructor has an unexpected shape");
      auto sorts = chan_sorts[init_call_channel(name)];
      Initial i;
      for (std::size_t k = 2; k < p->fields.size(); ++k) {
        if (p->fields[k].kind != CommField::Kind::Input) throw ShapeMismatch(name + " constructor parameter");
        i.params.push_back({p->fields[k].var, k < sorts.size() ? sorts[k] : Sort::Nat});
      }
      i.body = unwrap_method(im, init_call_channel(name), init_ret_channel(name));
      init_arity[name] = i.params.size();
      init = std::move(i);
    }
    auto hae = unwrap_method(v.need("handleAsyncEventMeth"), "handleAsyncEventCall", "handleAsyncEventRet");
    auto aux = v.aux({"initialMeth", "handleAsyncEventMeth"});
    if (c.kind == FrameworkKind::PEHFW)
      out_para[name] = PeriodicHandlerDecl{name, TimeExpr::literal(0), TimeExpr::literal(0), c.app->state,
                                           init, hae, aux, {}};
    else
      out_para[name] = AperiodicHandlerDecl{name, c.app->state, init, hae, aux, {}};
  }

  std::set<std::string> started;
  for (const auto& [name, c] : composed) {
    AppView v{*c.app, name};
    switch (c.kind) {
      case FrameworkKind::SafeletFW: {
        SafeletDecl s;
        s.name = name;
        s.state = c.app->state;
        s.initialize = unwrap_method(v.need("initializeApplicationMeth"), "safeletInitializeCall",
                                     "safeletInitializeRet");
        std::tie(s.sequencer_result, s.get_sequencer) =
            unwrap_result_method(v.need("getSequencerMeth"), "getSequencerCall", "getSequencerRet");
        s.methods = v.aux({"getSequencerMeth", "initializeApplicationMeth"});
        out_para[name] = s;
        break;
      }
      case FrameworkKind::SequencerFW: {
        SequencerDecl s;
        s.name = name;
        s.state = c.app->state;
        s.initial = v.initial();
        std::tie(s.mission_result, s.get_next_mission) =
            unwrap_result_method(v.need("getNextMissionMeth"), "getNextMissionCall", "getNextMissionRet");
        s.methods = v.aux({"getNextMissionMeth"});
        out_para[name] = s;
        break;
      }
      case FrameworkKind::MissionFW: {
        MissionDecl m;
        m.name = name;
        m.state = c.app->state;
        m.initial = v.initial();
        m.cleanup = unwrap_method(v.need("cleanupMissionMeth"), "cleanupMissionCall", "cleanupMissionRet");
        m.methods = v.aux({"missionInitializeMeth", "startHandlersMeth", "stopHandlersMeth", "cleanupMissionMeth"});

        auto* sp = as_prefix(v.need("startHandlersMeth"), "startHandlersCall");
        if (!sp) throw ShapeMismatch(name + " startHandlers has an unexpected shape");
        auto leaves = seq_leaves(sp->cont);
        leaves.pop_back();
        for (const auto& l : leaves) {
          auto* p = as_prefix(l);
          if (!p || p->fields.size() < 2) throw ShapeMismatch(name + " start step has an unexpected shape");
          auto hit = by_id.find(name_text(p->fields[1].expr));
          if (hit == by_id.end()) throw ShapeMismatch(name + " starts an unknown handler");
          const auto& h = hit->second;
          if (p->channel == "start_peh") {
            auto* ph = std::get_if<PeriodicHandlerDecl>(&out_para[h]);
            if (!ph || p->fields.size() != 4) throw ShapeMismatch(name + " start_peh step for " + h);
            ph->start = time_of_expr(p->fields[2].expr);
            ph->period = time_of_expr(p->fields[3].expr);
          } else if (p->channel != "start_apeh") {
            throw ShapeMismatch(name + " start step on " + p->channel);
          }
          started.insert(h);
          m.handlers.push_back({h, {}, {}});
        }

        // Peel the constructor calls appended to initialize, last handler first.
        auto body = unwrap_method(v.need("missionInitializeMeth"), "missionInitializeCall", "missionInitializeRet");
        for (auto it = m.handlers.rbegin(); it != m.handlers.rend(); ++it) {
          if (!init_arity.count(it->name)) continue;
          auto is_step = [&](const ActionPtr& a) { return as_prefix(a, init_call_channel(it->name)); };
          const Action::Prefix* step = nullptr;
          if (auto* s = std::get_if<Action::Seq>(&body->node); s && (step = is_step(s->rhs))) {
            body = s->lhs;
          } else if ((step = is_step(body))) {
            body = skip();
          } else {
            throw ShapeMismatch(name + " initialize lacks the constructor call of " + it->name);
          }
          for (std::size_t k = 2; k < step->fields.size(); ++k) it->args.push_back(step->fields[k].expr);
        }
        m.initialize = body;
        out_para[name] = m;
        break;
      }
      default: break;
    }
  }
  for (const auto& [name, c] : composed)
    if (c.kind == FrameworkKind::PEHFW && !started.count(name))
      throw ShapeMismatch("periodic handler " + name + " is not started by any mission");

  std::set<std::string> generated;
  for (const auto& d : framework_channels())
    for (const auto& n : d.names) generated.insert(n);
  std::set<std::string> ids;
  for (const auto& [name, c] : composed) {
    ids.insert(component_id(name));
    generated.insert(init_call_channel(name));
    generated.insert(init_ret_channel(name));
    for (const auto& d : c.app->actions)
      if (d.name.ends_with("Meth")) {
        auto m = d.name.substr(0, d.name.size() - 4);
        generated.insert(m + "Call");
        generated.insert(m + "Ret");
      }
  }

  SCJProgram result;
  const ProcessDecl* application = nullptr;
  for (const auto& para : program) {
    if (auto* c = std::get_if<ChannelDecl>(&para)) {
      bool all = !composed.empty();
      for (const auto& n : c->names) all = all && generated.count(n);
      if (all) continue;
    } else if (auto* i = std::get_if<IdsDecl>(&para)) {
      bool all = !composed.empty();
      for (const auto& n : i->names) all = all && ids.count(n);
      if (all) continue;
    } else if (auto* d = std::get_if<ProcessDecl>(&para)) {
      if (!composed.empty() && fw_names.count(d->name)) continue;
      if (composed.count(d->name)) {
        result.push_back(out_para.at(d->name));
        continue;
      }
      if (d->name.size() > 4 && d->name.ends_with("_App") && composed.count(d->name.substr(0, d->name.size() - 4)))
        continue;
      if (d->name == "Application") {
        application = d;
        continue;
      }
    }
    result.push_back(para);
  }
  if (application && !equal(application->body, application_process(result)))
    result.push_back(CircusParagraph{*application});
  return result;
}

}  // namespace scjc
