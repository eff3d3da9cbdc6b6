#include "scjc/checker.hpp"

#include <algorithm>
#include <cctype>

#include "scjc/analysis.hpp"
#include "scjc/frameworks.hpp"
#include "scjc/printer.hpp"

namespace scjc {

const std::set<NewKind>& AllocPolicy::permitted(ParagraphKind k) {
  static const std::set<NewKind> safelet = {NewKind::NewI};
  static const std::set<NewKind> mission = {NewKind::NewI, NewKind::NewM};
  static const std::set<NewKind> handler = {NewKind::NewI, NewKind::NewM, NewKind::NewPR,
                                            NewKind::NewPM};
  switch (k) {
    case ParagraphKind::Safelet: return safelet;
    case ParagraphKind::Sequencer:
    case ParagraphKind::Mission: return mission;
    case ParagraphKind::Handler:
    case ParagraphKind::Circus: return handler;
  }
  return handler;
}

const std::set<std::string>& builtin_sets() {
  static const std::set<std::string> sets = {"theSame"};
  return sets;
}

namespace {

std::string kind_name(ParagraphKind k) {
  switch (k) {
    case ParagraphKind::Safelet: return "safelet";
    case ParagraphKind::Sequencer: return "sequencer";
    case ParagraphKind::Mission: return "mission";
    case ParagraphKind::Handler: return "handler";
    case ParagraphKind::Circus: return "process";
  }
  return "?";
}

struct Env {
  std::map<std::string, std::vector<Sort>> channels;
  std::set<std::string> constants;  // consts, ids, generated component ids
  std::map<std::string, std::size_t> processes;  // name -> arity
};

class Checker {
 public:
  Diagnostics diags;

  void error(const std::string& code, const std::string& msg, const SourceSpan& span) {
    diags.push_back(Diagnostic{Severity::Error, code, msg, span});
  }

  // ---- declarations -------------------------------------------------------

  void declare_framework_channels() {
    for (const auto& [n, s] : framework_channel_sorts()) env_.channels[n] = s;
  }

  void declare(const CircusParagraph& p, std::set<std::string>& names) {
    std::visit(
        [&](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, ChannelDecl>) {
            for (const auto& n : d.names) {
              if (!names.insert(n).second || env_.channels.count(n))
                error("E-DUP", "duplicate declaration of channel " + n, d.span);
              env_.channels[n] = d.sorts;
            }
          } else if constexpr (std::is_same_v<T, ConstDecl> || std::is_same_v<T, IdsDecl>) {
            for (const auto& n : d.names) {
              if (!names.insert(n).second) error("E-DUP", "duplicate declaration of " + n, d.span);
              env_.constants.insert(n);
            }
          } else {
            if (!names.insert(d.name).second)
              error("E-DUP", "duplicate paragraph name " + d.name, d.span);
            std::size_t arity = 0;
            if (auto* pr = std::get_if<Process::Param>(&d.body->node)) arity = pr->params.size();
            env_.processes[d.name] = arity;
          }
        },
        p);
  }

  // ---- scopes -------------------------------------------------------------

  struct Scope {
    std::vector<std::string> vars;
    std::vector<std::string> mus;
    std::vector<std::string> locals;              // process parameters
    const std::set<std::string>* actions = nullptr;  // named actions in scope
    ParagraphKind kind = ParagraphKind::Circus;
    std::string owner;
  };

  static bool is_component_id(const std::string& n) {
    return n.size() > 2 && n.compare(n.size() - 2, 2, "ID") == 0 && std::isupper(static_cast<unsigned char>(n[0]));
  }

  static bool has(const std::vector<std::string>& v, const std::string& n) {
    return std::find(v.begin(), v.end(), n) != v.end();
  }

  bool is_const(const Scope& sc, const std::string& n) const {
    return env_.constants.count(n) || has(sc.locals, n);
  }

  // ---- expressions --------------------------------------------------------

  void check_alloc(const Scope& sc, NewKind k, const std::string& type, const SourceSpan& span) {
    if (sc.kind == ParagraphKind::Circus) return;
    if (!AllocPolicy::allows(sc.kind, k))
      error("E-ALLOC",
            to_string(k) + " " + type + " is not permitted in " + kind_name(sc.kind) + " " + sc.owner,
            span);
  }

  void check_expr(const ExprPtr& e, const Scope& sc, const SourceSpan& span) {
    if (!e) return;
    for_each_subexpr(e, [&](const Expr& x) {
      if (auto* n = std::get_if<Expr::Name>(&x.node)) {
        if (n->kind == NameKind::Variable) {
          if (has(sc.vars, n->text)) return;
          if (is_component_id(n->text))
            error("E-REF", "reference to undeclared component " + n->text, span);
          else
            error("E-BIND", "unbound variable " + n->text, span);
        } else if (!is_const(sc, n->text)) {
          error("E-BIND", "undeclared constant " + n->text, span);
        }
      } else if (auto* m = std::get_if<Expr::Member>(&x.node)) {
        if (!builtin_sets().count(m->set)) error("E-BIND", "unknown set " + m->set, span);
      } else if (auto* nw = std::get_if<Expr::New>(&x.node)) {
        check_alloc(sc, nw->kind, nw->type, span);
      }
    });
  }

  void check_time(const TimeExpr& t, const Scope& sc, const SourceSpan& span) {
    switch (t.form) {
      case TimeExpr::Form::Literal: return;
      case TimeExpr::Form::Named:
        if (t.kind == NameKind::Variable) {
          if (!has(sc.vars, t.name)) error("E-BIND", "unbound variable " + t.name, span);
        } else if (!is_const(sc, t.name)) {
          error("E-BIND", "undeclared time constant " + t.name, span);
        }
        return;
      case TimeExpr::Form::Sum:
        check_time(*t.lhs, sc, span);
        check_time(*t.rhs, sc, span);
        return;
    }
  }

  static std::optional<std::int64_t> literal_value(const TimeExpr& t) {
    switch (t.form) {
      case TimeExpr::Form::Literal: return t.value;
      case TimeExpr::Form::Named: return std::nullopt;
      case TimeExpr::Form::Sum: {
        auto l = literal_value(*t.lhs), r = literal_value(*t.rhs);
        if (l && r) return *l + *r;
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  void check_chanset(const ChanSet& cs, const Scope& sc, const SourceSpan& span) {
    for (const auto& r : cs) {
      auto it = env_.channels.find(r.channel);
      if (it == env_.channels.end()) {
        error("E-CHAN", "undeclared channel " + r.channel, span);
        continue;
      }
      if (r.prefix.size() > it->second.size())
        error("E-CHAN",
              "channel " + r.channel + " carries " + std::to_string(it->second.size()) +
                  " values, set member restricts " + std::to_string(r.prefix.size()),
              span);
      for (const auto& e : r.prefix) check_expr(e, sc, span);
    }
  }

  // ---- actions ------------------------------------------------------------

  void check_action(const ActionPtr& a, Scope& sc, const SourceSpan& outer) {
    if (!a) return;
    const SourceSpan span = a->span.known() ? a->span : outer;
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Action::Prefix>) {
            auto it = env_.channels.find(x.channel);
            if (it == env_.channels.end()) {
              error("E-CHAN", "undeclared channel " + x.channel, span);
            } else if (it->second.size() != x.fields.size()) {
              error("E-CHAN",
                    "channel " + x.channel + " expects " + std::to_string(it->second.size()) +
                        " fields, found " + std::to_string(x.fields.size()),
                    span);
            }
            auto mark = sc.vars.size();
            for (const auto& f : x.fields) {
              if (f.kind == CommField::Kind::Input) {
                sc.vars.push_back(f.var);
              } else {
                check_expr(f.expr, sc, span);
              }
            }
            check_action(x.cont, sc, span);
            sc.vars.resize(mark);
          } else if constexpr (std::is_same_v<T, Action::ExtChoice> ||
                               std::is_same_v<T, Action::IntChoice> ||
                               std::is_same_v<T, Action::Seq> ||
                               std::is_same_v<T, Action::Interleave> ||
                               std::is_same_v<T, Action::Interrupt>) {
            check_action(x.lhs, sc, span);
            check_action(x.rhs, sc, span);
          } else if constexpr (std::is_same_v<T, Action::Parallel>) {
            for (const auto& n : x.ns1)
              if (has(x.ns2, n)) error("E-PART", "variable " + n + " occurs in both name sets", span);
            for (const auto& n : x.ns1)
              if (!has(sc.vars, n)) error("E-BIND", "unbound variable " + n + " in name set", span);
            for (const auto& n : x.ns2)
              if (!has(sc.vars, n)) error("E-BIND", "unbound variable " + n + " in name set", span);
            check_chanset(x.cs, sc, span);
            check_action(x.lhs, sc, span);
            check_action(x.rhs, sc, span);
          } else if constexpr (std::is_same_v<T, Action::Hide>) {
            check_chanset(x.cs, sc, span);
            check_action(x.body, sc, span);
          } else if constexpr (std::is_same_v<T, Action::Mu>) {
            sc.mus.push_back(x.var);
            check_action(x.body, sc, span);
            sc.mus.pop_back();
          } else if constexpr (std::is_same_v<T, Action::RecVar>) {
            if (!has(sc.mus, x.name)) error("E-BIND", "unbound action variable " + x.name, span);
          } else if constexpr (std::is_same_v<T, Action::Call>) {
            if (!sc.actions || !sc.actions->count(x.name))
              error("E-BIND", "unbound action name " + x.name, span);
          } else if constexpr (std::is_same_v<T, Action::Wait>) {
            check_time(x.duration, sc, span);
          } else if constexpr (std::is_same_v<T, Action::WaitRange>) {
            check_time(x.lo, sc, span);
            check_time(x.hi, sc, span);
            auto lo = literal_value(x.lo), hi = literal_value(x.hi);
            if (lo && hi && *lo > *hi)
              error("E-TIME",
                    "empty wait range " + std::to_string(*lo) + ".." + std::to_string(*hi), span);
          } else if constexpr (std::is_same_v<T, Action::Deadline> ||
                               std::is_same_v<T, Action::StartBy>) {
            check_time(x.d, sc, span);
            check_action(x.body, sc, span);
          } else if constexpr (std::is_same_v<T, Action::Assign>) {
            if (!has(sc.vars, x.var)) error("E-BIND", "assignment to unbound variable " + x.var, span);
            check_expr(x.value, sc, span);
          } else if constexpr (std::is_same_v<T, Action::VarBlock>) {
            auto mark = sc.vars.size();
            for (const auto& d : x.decls) sc.vars.push_back(d.name);
            check_action(x.body, sc, span);
            sc.vars.resize(mark);
          } else if constexpr (std::is_same_v<T, Action::Guarded>) {
            for (const auto& b : x.branches) {
              check_expr(b.guard, sc, span);
              check_action(b.body, sc, span);
            }
          } else if constexpr (std::is_same_v<T, Action::Alloc>) {
            check_alloc(sc, x.kind, x.type, span);
            for (const auto& e : x.args) check_expr(e, sc, span);
          } else if constexpr (std::is_same_v<T, Action::Hole>) {
            error("E-BIND", "placeholder outside a law context", span);
          }
        },
        a->node);
  }

  // ---- processes ----------------------------------------------------------

  void check_process(const ProcessPtr& p, Scope& sc, const SourceSpan& outer) {
    if (!p) return;
    const SourceSpan span = p->span.known() ? p->span : outer;
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Process::Basic>) {
            std::set<std::string> names;
            for (const auto& d : x.actions)
              if (!names.insert(d.name).second) error("E-DUP", "duplicate action " + d.name, span);
            Scope inner = sc;
            inner.actions = &names;
            for (const auto& v : x.state) inner.vars.push_back(v.name);
            for (const auto& d : x.actions) check_action(d.body, inner, span);
            check_action(x.main, inner, span);
          } else if constexpr (std::is_same_v<T, Process::Par>) {
            check_chanset(x.cs, sc, span);
            check_process(x.lhs, sc, span);
            check_process(x.rhs, sc, span);
          } else if constexpr (std::is_same_v<T, Process::Interleave>) {
            check_process(x.lhs, sc, span);
            check_process(x.rhs, sc, span);
          } else if constexpr (std::is_same_v<T, Process::Hide>) {
            check_chanset(x.cs, sc, span);
            check_process(x.body, sc, span);
          } else if constexpr (std::is_same_v<T, Process::Param>) {
            auto mark = sc.locals.size();
            for (const auto& v : x.params) sc.locals.push_back(v.name);
            check_process(x.body, sc, span);
            sc.locals.resize(mark);
          } else if constexpr (std::is_same_v<T, Process::Inst>) {
            check_process_ref(x.name, x.args.size(), span);
            for (const auto& e : x.args) check_expr(e, sc, span);
          } else {
            check_process_ref(x.name, 0, span);
          }
        },
        p->node);
  }

  void check_process_ref(const std::string& name, std::size_t nargs, const SourceSpan& span) {
    auto it = env_.processes.find(name);
    if (it == env_.processes.end()) {
      error("E-REF", "reference to undeclared process " + name, span);
      return;
    }
    std::size_t nparams = it->second;
    if (nparams != nargs)
      error("E-REF",
            "process " + name + " expects " + std::to_string(nparams) + " arguments, given " +
                std::to_string(nargs),
            span);
  }

  void check_circus(const CircusParagraph& p) {
    if (auto* pd = std::get_if<ProcessDecl>(&p)) {
      Scope sc;
      sc.owner = pd->name;
      check_process(pd->body, sc, pd->span);
    }
  }

  // ---- SCJ paragraphs -----------------------------------------------------

  struct Components {
    std::set<std::string> sequencer_ids, mission_ids, aperiodic_ids, handlers;
    std::map<std::string, std::size_t> handler_arity;
    std::set<std::string> registered;
  };

  void check_body(const std::string& what, const ActionPtr& body, Scope& sc, const SourceSpan& span) {
    if (!body) {
      error("E-METH", kind_name(sc.kind) + " " + sc.owner + ": missing mandatory " + what, span);
      return;
    }
    check_action(body, sc, span);
  }

  Scope component_scope(ParagraphKind k, const std::string& name, const std::vector<VarDecl>& state) {
    Scope sc;
    sc.kind = k;
    sc.owner = name;
    for (const auto& v : state) sc.vars.push_back(v.name);
    return sc;
  }

  void check_methods(const std::vector<MethodDef>& ms, Scope& sc, std::set<std::string> reserved,
                     const SourceSpan& span) {
    for (const auto& m : ms) {
      if (!reserved.insert(m.name).second)
        error("E-DUP", sc.owner + ": duplicate method " + m.name, m.span.known() ? m.span : span);
      else if (framework_channel_sorts().count(m.name + "Call") ||
               framework_channel_sorts().count(m.name + "Ret"))
        error("E-DUP", sc.owner + ": method " + m.name + " clashes with a framework channel",
              m.span.known() ? m.span : span);
      check_body(m.name, m.body, sc, m.span.known() ? m.span : span);
    }
  }

  void check_result_refs(const ActionPtr& body, const std::string& result,
                         const std::set<std::string>& allowed, const std::string& what,
                         const SourceSpan& span) {
    if (!body) return;
    for_each_action(body, [&](const Action& a) {
      auto* as = std::get_if<Action::Assign>(&a.node);
      if (!as || as->this_qualified || as->var != result) return;
      auto* n = std::get_if<Expr::Name>(&as->value->node);
      if (n && n->kind == NameKind::Constant && !allowed.count(n->text))
        error("E-REF", "returned " + n->text + " is not a declared " + what,
              a.span.known() ? a.span : span);
    });
  }

  void check_release_targets(const ActionPtr& body, const Components& c, const SourceSpan& span) {
    if (!body) return;
    for_each_action(body, [&](const Action& a) {
      auto* p = std::get_if<Action::Prefix>(&a.node);
      if (!p || p->channel != "release" || p->fields.empty() || !p->fields[0].expr) return;
      auto* n = std::get_if<Expr::Name>(&p->fields[0].expr->node);
      if (n && n->kind == NameKind::Constant && !c.aperiodic_ids.count(n->text))
        error("E-REF", "release target " + n->text + " is not an aperiodic handler",
              a.span.known() ? a.span : span);
    });
  }

  void check_handler_common(const std::string& name, const std::vector<VarDecl>& state,
                            const std::optional<Initial>& initial, const ActionPtr& hae,
                            const std::vector<MethodDef>& methods, const Components& c,
                            const SourceSpan& span) {
    Scope sc = component_scope(ParagraphKind::Handler, name, state);
    if (initial) {
      Scope init = sc;
      for (const auto& p : initial->params) init.vars.push_back(p.name);
      check_body("initial", initial->body, init, span);
    }
    check_body("handleAsyncEvent", hae, sc, span);
    check_methods(methods, sc, {"initial", "handleAsyncEvent"}, span);
    check_release_targets(hae, c, span);
    for (const auto& m : methods) check_release_targets(m.body, c, span);
    if (!c.registered.count(name))
      error("E-REF", "handler " + name + " is not registered by any mission", span);
  }

  void check_scj(const SCJParagraph& p, const Components& c) {
    std::visit(
        [&](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, CircusParagraph>) {
            check_circus(d);
          } else if constexpr (std::is_same_v<T, SafeletDecl>) {
            Scope sc = component_scope(ParagraphKind::Safelet, d.name, d.state);
            check_methods(d.methods, sc, {"initialize", "getSequencer", "initializeApplication"}, d.span);
            check_body("initialize", d.initialize, sc, d.span);
            Scope gs = sc;
            gs.vars.push_back(d.sequencer_result);
            check_body("getSequencer", d.get_sequencer, gs, d.span);
            check_result_refs(d.get_sequencer, d.sequencer_result, c.sequencer_ids, "sequencer", d.span);
          } else if constexpr (std::is_same_v<T, SequencerDecl>) {
            Scope sc = component_scope(ParagraphKind::Sequencer, d.name, d.state);
            if (d.initial) check_body("initial", d.initial->body, sc, d.span);
            Scope gm = sc;
            gm.vars.push_back(d.mission_result);
            check_body("getNextMission", d.get_next_mission, gm, d.span);
            check_methods(d.methods, sc, {"initial", "getNextMission"}, d.span);
            check_result_refs(d.get_next_mission, d.mission_result, c.mission_ids, "mission", d.span);
          } else if constexpr (std::is_same_v<T, MissionDecl>) {
            Scope sc = component_scope(ParagraphKind::Mission, d.name, d.state);
            if (d.initial) check_body("initial", d.initial->body, sc, d.span);
            check_body("initialize", d.initialize, sc, d.span);
            check_body("cleanup", d.cleanup, sc, d.span);
            check_methods(d.methods, sc, {"initial", "initialize", "cleanup", "missionInitialize", "startHandlers", "stopHandlers", "cleanupMission"}, d.span);
            std::set<std::string> seen;
            for (const auto& h : d.handlers) {
              SourceSpan hs = h.span.known() ? h.span : d.span;
              if (!seen.insert(h.name).second)
                error("E-DUP", "mission " + d.name + " registers " + h.name + " twice", hs);
              auto it = c.handler_arity.find(h.name);
              if (it == c.handler_arity.end()) {
                error("E-REF", "mission " + d.name + " references undeclared handler " + h.name, hs);
              } else if (it->second != h.args.size()) {
                error("E-REF",
                      "handler " + h.name + " expects " + std::to_string(it->second) +
                          " constructor arguments, given " + std::to_string(h.args.size()),
                      hs);
              }
              for (const auto& e : h.args) check_expr(e, sc, hs);
            }
          } else if constexpr (std::is_same_v<T, PeriodicHandlerDecl>) {
            Scope sc = component_scope(ParagraphKind::Handler, d.name, {});
            check_time(d.start, sc, d.span);
            check_time(d.period, sc, d.span);
            check_handler_common(d.name, d.state, d.initial, d.handle_async_event, d.methods, c, d.span);
          } else {
            check_handler_common(d.name, d.state, d.initial, d.handle_async_event, d.methods, c, d.span);
          }
        },
        p);
  }

  Diagnostics run(const SCJProgram& prog) {
    declare_framework_channels();
    std::set<std::string> names;
    Components c;
    int safelets = 0, sequencers = 0;
    bool any_scj = false;
    SourceSpan first_span;
    for (const auto& p : prog) {
      if (auto* cp = std::get_if<CircusParagraph>(&p)) {
        declare(*cp, names);
        continue;
      }
      any_scj = true;
      std::string n = paragraph_name(p);
      SourceSpan span = paragraph_span(p);
      if (!first_span.known()) first_span = span;
      if (!names.insert(n).second) error("E-DUP", "duplicate paragraph name " + n, span);
      if (!names.insert(component_id(n)).second)
        error("E-DUP", "identifier " + component_id(n) + " is already declared", span);
      env_.constants.insert(component_id(n));
      env_.processes[n] = 0;
      switch (p.index()) {
        case 0:
          if (++safelets > 1) error("E-DUP", "more than one safelet", span);
          break;
        case 1:
          if (++sequencers > 1) error("E-DUP", "more than one sequencer", span);
          c.sequencer_ids.insert(component_id(n));
          break;
        case 2:
          c.mission_ids.insert(component_id(n));
          for (const auto& h : std::get<MissionDecl>(p).handlers) c.registered.insert(h.name);
          break;
        case 3: {
          const auto& h = std::get<PeriodicHandlerDecl>(p);
          c.handler_arity[n] = h.initial ? h.initial->params.size() : 0;
          break;
        }
        case 4: {
          const auto& h = std::get<AperiodicHandlerDecl>(p);
          c.handler_arity[n] = h.initial ? h.initial->params.size() : 0;
          c.aperiodic_ids.insert(component_id(n));
          break;
        }
      }
    }
    for (const auto& p : prog) {
      std::string n = paragraph_name(p);
      if (!n.empty() && reserved_names().count(n))
        error("E-DUP", n + " is a reserved framework name", paragraph_span(p));
      if (auto* cp = std::get_if<CircusParagraph>(&p))
        if (auto* cd = std::get_if<ChannelDecl>(cp))
          for (const auto& cn : cd->names)
            if (reserved_names().count(cn))
              error("E-DUP", cn + " is a reserved framework name", cd->span);
    }
    if (any_scj) env_.processes["Application"] = 0;
    if (any_scj && safelets == 0) error("E-REF", "program declares no safelet", first_span);
    if (any_scj && sequencers == 0) error("E-REF", "program declares no sequencer", first_span);
    for (const auto& p : prog) check_scj(p, c);
    return finish();
  }

  Diagnostics run(const CircusProgram& prog) {
    std::set<std::string> names;
    for (const auto& p : prog) declare(p, names);
    for (const auto& p : prog) check_circus(p);
    return finish();
  }

 private:
  Diagnostics finish() {
    std::stable_sort(diags.begin(), diags.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return a.span < b.span; });
    return diags;
  }

  Env env_;
};

// ---- timing ----------------------------------------------------------------

template <class T>
const T* find_node(const ActionPtr& a) {
  const T* found = nullptr;
  if (!a) return nullptr;
  for_each_action(a, [&](const Action& x) {
    if (!found)
      if (auto* n = std::get_if<T>(&x.node)) found = n;
  });
  return found;
}

// Identifier released by a `release!e` prefix: a constant directly, or a
// state variable initialised from a constructor argument of the mission.
std::optional<std::string> release_target(const ExprPtr& e, const PeriodicHandlerDecl& ph,
                                          const HandlerRef& ref) {
  auto* n = std::get_if<Expr::Name>(&e->node);
  if (!n) return std::nullopt;
  if (n->kind == NameKind::Constant) return n->text;
  if (!ph.initial) return std::nullopt;
  std::optional<std::string> out;
  for_each_action(ph.initial->body, [&](const Action& a) {
    auto* as = std::get_if<Action::Assign>(&a.node);
    if (!as || as->var != n->text) return;
    auto* src = std::get_if<Expr::Name>(&as->value->node);
    if (!src) return;
    for (std::size_t i = 0; i < ph.initial->params.size() && i < ref.args.size(); ++i) {
      if (ph.initial->params[i].name != src->text) continue;
      if (auto* arg = std::get_if<Expr::Name>(&ref.args[i]->node))
        if (arg->kind == NameKind::Constant) out = arg->text;
    }
  });
  return out;
}

bool releases(const PeriodicHandlerDecl& ph, const HandlerRef& ref, const std::string& target_id) {
  bool hit = false;
  if (!ph.handle_async_event) return false;
  for_each_action(ph.handle_async_event, [&](const Action& x) {
    auto* p = std::get_if<Action::Prefix>(&x.node);
    if (!p || p->channel != "release" || p->fields.empty() || !p->fields[0].expr) return;
    if (release_target(p->fields[0].expr, ph, ref) == target_id) hit = true;
  });
  return hit;
}

class TimingChecker {
 public:
  TimingChecker(const ConstBindings& b) : bindings_(b) {}

  std::optional<std::int64_t> resolve(const TimeExpr& t, const SourceSpan& span) {
    switch (t.form) {
      case TimeExpr::Form::Literal: return t.value;
      case TimeExpr::Form::Named: {
        if (t.kind == NameKind::Variable) return std::nullopt;
        auto it = bindings_.find(t.name);
        if (it != bindings_.end()) return it->second;
        if (reported_.insert(t.name).second)
          diags.push_back({Severity::Error, "E-UNBOUND", "time constant " + t.name + " has no binding", span});
        return std::nullopt;
      }
      case TimeExpr::Form::Sum: {
        auto l = resolve(*t.lhs, span);
        auto r = resolve(*t.rhs, span);
        if (l && r) return *l + *r;
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  void scan(const ActionPtr& a, const SourceSpan& outer) {
    if (!a) return;
    for_each_action(a, [&](const Action& x) {
      SourceSpan span = x.span.known() ? x.span : outer;
      if (auto* w = std::get_if<Action::Wait>(&x.node)) {
        resolve(w->duration, span);
      } else if (auto* r = std::get_if<Action::WaitRange>(&x.node)) {
        auto lo = resolve(r->lo, span), hi = resolve(r->hi, span);
        if (lo && hi && *lo > *hi)
          diags.push_back({Severity::Error, "E-TIME",
                           "empty wait range " + pretty_print(r->lo) + ".." + pretty_print(r->hi) +
                               " (" + std::to_string(*lo) + " > " + std::to_string(*hi) + ")",
                           span});
      } else if (auto* d = std::get_if<Action::Deadline>(&x.node)) {
        resolve(d->d, span);
      } else if (auto* s = std::get_if<Action::StartBy>(&x.node)) {
        resolve(s->d, span);
      }
    });
  }

  // Checks sum(lhs) <= rhs, each side optional-resolved.
  void inequality(const std::vector<const TimeExpr*>& lhs, const TimeExpr& rhs,
                  const std::string& pair, const SourceSpan& span) {
    std::int64_t total = 0;
    std::string names, values;
    for (const auto* t : lhs) {
      auto v = resolve(*t, span);
      if (!v) return;
      total += *v;
      if (!names.empty()) {
        names += " + ";
        values += " + ";
      }
      names += pretty_print(*t);
      values += std::to_string(*v);
    }
    auto r = resolve(rhs, span);
    if (!r || total <= *r) return;
    diags.push_back({Severity::Warning, "W-TIMING",
                     names + " <= " + pretty_print(rhs) + " violated for " + pair + ": " + values +
                         " = " + std::to_string(total) + " > " + std::to_string(*r),
                     span});
  }

  Diagnostics diags;

 private:
  const ConstBindings& bindings_;
  std::set<std::string> reported_;
};

}  // namespace

Diagnostics check_program(const SCJProgram& p) { return Checker().run(p); }

Diagnostics check_circus_program(const CircusProgram& p) { return Checker().run(p); }

Diagnostics check_timing_conditions(const SCJProgram& prog, const ConstBindings& bindings) {
  TimingChecker tc(bindings);
  std::map<std::string, const PeriodicHandlerDecl*> periodic;
  std::map<std::string, const AperiodicHandlerDecl*> aperiodic;
  for (const auto& p : prog) {
    SourceSpan span = paragraph_span(p);
    std::visit(
        [&](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, CircusParagraph>) {
            if (auto* pd = std::get_if<ProcessDecl>(&d)) {
              std::function<void(const ProcessPtr&)> walk = [&](const ProcessPtr& pr) {
                std::visit(
                    [&](const auto& x) {
                      using U = std::decay_t<decltype(x)>;
                      if constexpr (std::is_same_v<U, Process::Basic>) {
                        for (const auto& a : x.actions) tc.scan(a.body, span);
                        tc.scan(x.main, span);
                      } else if constexpr (std::is_same_v<U, Process::Par>) {
                        walk(x.lhs);
                        walk(x.rhs);
                      } else if constexpr (std::is_same_v<U, Process::Interleave>) {
                        walk(x.lhs);
                        walk(x.rhs);
                      } else if constexpr (std::is_same_v<U, Process::Hide> ||
                                           std::is_same_v<U, Process::Param>) {
                        walk(x.body);
                      }
                    },
                    pr->node);
              };
              walk(pd->body);
            }
          } else {
            if constexpr (std::is_same_v<T, SafeletDecl>) {
              tc.scan(d.initialize, span);
              tc.scan(d.get_sequencer, span);
            } else if constexpr (std::is_same_v<T, SequencerDecl>) {
              if (d.initial) tc.scan(d.initial->body, span);
              tc.scan(d.get_next_mission, span);
            } else if constexpr (std::is_same_v<T, MissionDecl>) {
              if (d.initial) tc.scan(d.initial->body, span);
              tc.scan(d.initialize, span);
              tc.scan(d.cleanup, span);
            } else {
              if (d.initial) tc.scan(d.initial->body, span);
              tc.scan(d.handle_async_event, span);
              if constexpr (std::is_same_v<T, PeriodicHandlerDecl>) {
                tc.resolve(d.start, span);
                tc.resolve(d.period, span);
                periodic[d.name] = &d;
              } else {
                aperiodic[d.name] = &d;
              }
            }
            for (const auto& m : d.methods) tc.scan(m.body, span);
          }
        },
        p);
  }

  for (const auto& p : prog) {
    auto* m = std::get_if<MissionDecl>(&p);
    if (!m) continue;
    for (const auto& hp : m->handlers) {
      auto pit = periodic.find(hp.name);
      if (pit == periodic.end()) continue;
      const PeriodicHandlerDecl& ph = *pit->second;
      for (const auto& ha : m->handlers) {
        auto ait = aperiodic.find(ha.name);
        if (ait == aperiodic.end()) continue;
        const AperiodicHandlerDecl& ah = *ait->second;
        if (!releases(ph, hp, component_id(ah.name))) continue;
        std::string pair = ph.name + "/" + ah.name;
        const auto* pd = std::get_if<Action::Deadline>(&ph.handle_async_event->node);
        if (!pd) continue;
        const auto* id = find_node<Action::StartBy>(pd->body);
        const auto* ptb = find_node<Action::WaitRange>(pd->body);
        std::vector<const TimeExpr*> first;
        if (ptb) first.push_back(&ptb->hi);
        if (id) first.push_back(&id->d);
        if (!first.empty()) tc.inequality(first, pd->d, pair, ph.span);
        if (ah.handle_async_event) {
          if (const auto* ad = std::get_if<Action::Deadline>(&ah.handle_async_event->node))
            tc.inequality({&pd->d, &ad->d}, ph.period, pair, ph.span);
        }
      }
    }
  }
  auto out = tc.diags;
  std::stable_sort(out.begin(), out.end(),
                   [](const Diagnostic& a, const Diagnostic& b) { return a.span < b.span; });
  return out;
}

}  // namespace scjc
