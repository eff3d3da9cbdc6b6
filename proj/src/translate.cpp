#include "scjc/translate.hpp"

#include <set>

#include "scjc/analysis.hpp"

namespace scjc {

namespace {

using Names = std::set<std::string>;

void collect_names(const ActionPtr& a, Names& out) {
  if (!a) return;
  for_each_action(a, [&](const Action& n) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Action::Prefix>) {
            for (const auto& f : x.fields)
              if (f.kind == CommField::Kind::Input) out.insert(f.var);
          } else if constexpr (std::is_same_v<T, Action::VarBlock>) {
            for (const auto& d : x.decls) out.insert(d.name);
          } else if constexpr (std::is_same_v<T, Action::Assign>) {
            out.insert(x.var);
          } else if constexpr (std::is_same_v<T, Action::Mu>) {
            out.insert(x.var);
          }
        },
        n.node);
  });
  for_each_expr(a, [&](const ExprPtr& e) {
    for_each_subexpr(e, [&](const Expr& s) {
      if (auto* nm = std::get_if<Expr::Name>(&s.node)) out.insert(nm->text);
    });
  });
}

std::string fresh(const std::string& base, const Names& used) {
  if (!used.count(base)) return base;
  for (int i = 1;; ++i) {
    auto c = base + std::to_string(i);
    if (!used.count(c)) return c;
  }
}

bool is_skip(const ActionPtr& a) { return a && std::holds_alternative<Action::Skip>(a->node); }

ActionPtr body_or_skip(const ActionPtr& a) { return a ? a : skip(); }

// Call?x!cid -> (BODY ; Ret!x!cid -> Skip)
ActionPtr method(const std::string& call_ch, const std::string& ret_ch, const std::string& cid,
                 const std::string& x, const ActionPtr& body) {
  auto ret = prefix(ret_ch, {CommField::out(var_name(x)), CommField::out(const_name(cid))}, skip());
  auto cont = is_skip(body) ? ret : seq(body, ret);
  return prefix(call_ch, {CommField::in(x), CommField::out(const_name(cid))}, cont);
}

// Call?x!cid -> var r: ID @ BODY ; Ret!x!cid!r -> Skip
ActionPtr result_method(const std::string& call_ch, const std::string& ret_ch, const std::string& cid,
                        const std::string& x, const std::string& r, const ActionPtr& body) {
  auto ret = prefix(ret_ch,
                    {CommField::out(var_name(x)), CommField::out(const_name(cid)),
                     CommField::out(var_name(r))},
                    skip());
  return prefix(call_ch, {CommField::in(x), CommField::out(const_name(cid))},
                var_block({{r, Sort::Id}}, seq(body, ret)));
}

ActionPtr methods_loop(const std::vector<std::string>& meths, const std::string& end_channel) {
  std::vector<ActionPtr> alts;
  for (const auto& m : meths) alts.push_back(seq(call(m), rec_var("X")));
  alts.push_back(prefix(end_channel, {}, skip()));
  return mu("X", fold_left(alts, ext_choice));
}

struct AppBuilder {
  std::string cid;
  std::string x;
  std::vector<ActionDef> defs;
  std::vector<std::string> loop;

  void add(const std::string& name, ActionPtr body, bool in_loop = true) {
    defs.push_back({name, std::move(body)});
    if (in_loop) loop.push_back(name);
  }

  void add_aux(const std::vector<MethodDef>& methods) {
    for (const auto& m : methods)
      add(m.name + "Meth", method(m.name + "Call", m.name + "Ret", cid, x, body_or_skip(m.body)));
  }

  ProcessPtr finish(std::vector<VarDecl> state, const std::string& end_channel, bool has_initial) {
    defs.push_back({"Methods", methods_loop(loop, end_channel)});
    auto main = has_initial ? seq(call("Initial"), call("Methods")) : call("Methods");
    return basic_process(std::move(state), std::move(defs), main);
  }
};

Names names_of(const std::vector<VarDecl>& state, std::initializer_list<ActionPtr> bodies,
               const std::vector<MethodDef>& methods, const std::optional<Initial>& initial) {
  Names n;
  for (const auto& v : state) n.insert(v.name);
  for (const auto& b : bodies) collect_names(b, n);
  for (const auto& m : methods) collect_names(m.body, n);
  if (initial) {
    for (const auto& p : initial->params) n.insert(p.name);
    collect_names(initial->body, n);
  }
  return n;
}

std::vector<std::string> method_names(const std::vector<MethodDef>& ms) {
  std::vector<std::string> out;
  for (const auto& m : ms) out.push_back(m.name);
  return out;
}

std::vector<CircusParagraph> compose(FrameworkKind kind, const std::string& name,
                                     const std::vector<MethodDef>& aux, ProcessPtr app) {
  auto app_name = name + "_App";
  auto cs = channel_set(kind, name, method_names(aux));
  auto fw = proc_inst(to_string(kind), {const_name(component_id(name))});
  auto composed = proc_hide(proc_par(fw, cs, proc_ref(app_name)), cs);
  return {ProcessDecl{app_name, std::move(app), {}}, ProcessDecl{name, std::move(composed), {}}};
}

template <typename T>
const T* find_decl(const SCJProgram& p, const std::string& name) {
  for (const auto& para : p)
    if (auto* d = std::get_if<T>(&para); d && d->name == name) return d;
  return nullptr;
}

ProcessPtr fold_proc(const std::vector<ProcessPtr>& items) {
  ProcessPtr acc;
  for (const auto& p : items) acc = acc ? proc_interleave(acc, p) : p;
  return acc;
}

// l [| cs |] r, degrading gracefully when either side is absent.
ProcessPtr par_opt(ProcessPtr l, ChanSet cs, ProcessPtr r) {
  if (!l) return r;
  if (!r) return l;
  if (cs.empty()) return proc_interleave(l, r);
  return proc_par(l, std::move(cs), r);
}

const std::optional<Initial>& initial_of(const SCJParagraph& p) {
  static const std::optional<Initial> none;
  if (auto* h = std::get_if<PeriodicHandlerDecl>(&p)) return h->initial;
  if (auto* h = std::get_if<AperiodicHandlerDecl>(&p)) return h->initial;
  return none;
}

ChanSet init_channels(const SCJProgram& p) {
  ChanSet cs;
  for (const auto& para : p) {
    const auto& init = initial_of(para);
    if (!init) continue;
    auto n = paragraph_name(para);
    cs.push_back({init_call_channel(n), {}});
    cs.push_back({init_ret_channel(n), {}});
  }
  return cs;
}

const std::vector<MethodDef>& aux_methods(const SCJParagraph& p) {
  static const std::vector<MethodDef> none;
  return std::visit(
      [](const auto& d) -> const std::vector<MethodDef>& {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SafeletDecl> || std::is_same_v<T, SequencerDecl> ||
                      std::is_same_v<T, MissionDecl> || std::is_same_v<T, PeriodicHandlerDecl> ||
                      std::is_same_v<T, AperiodicHandlerDecl>)
          return d.methods;
        else
          return none;
      },
      p);
}

bool is_scj(const SCJParagraph& p) { return paragraph_kind(p) != ParagraphKind::Circus; }

ChanSet cross_channels() {
  return chanset({"start_peh", "start_apeh", "done_handler", "requestTerminationCall",
                  "requestTerminationRet"});
}

}  // namespace

std::string init_call_channel(const std::string& handler) { return handler + "InitCall"; }
std::string init_ret_channel(const std::string& handler) { return handler + "InitRet"; }

ExprPtr expr_of_time(const TimeExpr& t) {
  switch (t.form) {
    case TimeExpr::Form::Literal: return num(t.value);
    case TimeExpr::Form::Named:
      return t.kind == NameKind::Constant ? const_name(t.name) : var_name(t.name);
    case TimeExpr::Form::Sum: return binary(BinOp::Add, expr_of_time(*t.lhs), expr_of_time(*t.rhs));
  }
  return num(0);
}

FrameworkKind framework_kind_of(const SCJParagraph& p) {
  switch (p.index()) {
    case 0: return FrameworkKind::SafeletFW;
    case 1: return FrameworkKind::SequencerFW;
    case 2: return FrameworkKind::MissionFW;
    case 3: return FrameworkKind::PEHFW;
    case 4: return FrameworkKind::APEHFW;
  }
  throw InternalError("plain Circus paragraph has no framework process");
}

ChanSet channel_set(FrameworkKind kind, const std::string&, const std::vector<std::string>& aux) {
  ChanSet cs;
  switch (kind) {
    case FrameworkKind::SafeletFW:
      cs = chanset({"safeletInitializeCall", "safeletInitializeRet", "getSequencerCall",
                    "getSequencerRet", "end_safelet_app"});
      break;
    case FrameworkKind::SequencerFW:
      cs = chanset({"getNextMissionCall", "getNextMissionRet", "end_sequencer_app"});
      break;
    case FrameworkKind::MissionFW:
      cs = chanset({"missionInitializeCall", "missionInitializeRet", "startHandlersCall",
                    "startHandlersRet", "stopHandlersCall", "stopHandlersRet", "cleanupMissionCall",
                    "cleanupMissionRet", "end_mission_app"});
      break;
    case FrameworkKind::PEHFW:
    case FrameworkKind::APEHFW:
      cs = chanset({"handleAsyncEventCall", "handleAsyncEventRet", "end_handler_app"});
      break;
  }
  for (const auto& m : aux) {
    cs.push_back({m + "Call", {}});
    cs.push_back({m + "Ret", {}});
  }
  return cs;
}

std::vector<CircusParagraph> translate_safelet(const SafeletDecl& s) {
  auto used = names_of(s.state, {s.initialize, s.get_sequencer}, s.methods, std::nullopt);
  used.insert(s.sequencer_result);
  AppBuilder b{component_id(s.name), fresh("x", used), {}, {}};
  b.add("getSequencerMeth", result_method("getSequencerCall", "getSequencerRet", b.cid, b.x,
                                          s.sequencer_result, body_or_skip(s.get_sequencer)));
  b.add("initializeApplicationMeth", method("safeletInitializeCall", "safeletInitializeRet", b.cid,
                                            b.x, body_or_skip(s.initialize)));
  b.add_aux(s.methods);
  return compose(FrameworkKind::SafeletFW, s.name, s.methods,
                 b.finish(s.state, "end_safelet_app", false));
}

std::vector<CircusParagraph> translate_sequencer(const SequencerDecl& s) {
  auto used = names_of(s.state, {s.get_next_mission}, s.methods, s.initial);
  used.insert(s.mission_result);
  AppBuilder b{component_id(s.name), fresh("x", used), {}, {}};
  if (s.initial && !s.initial->params.empty()) throw InternalError("sequencer constructors take no parameters");
  if (s.initial) b.add("Initial", body_or_skip(s.initial->body), false);
  b.add("getNextMissionMeth", result_method("getNextMissionCall", "getNextMissionRet", b.cid, b.x,
                                            s.mission_result, body_or_skip(s.get_next_mission)));
  b.add_aux(s.methods);
  return compose(FrameworkKind::SequencerFW, s.name, s.methods,
                 b.finish(s.state, "end_sequencer_app", s.initial.has_value()));
}

std::vector<CircusParagraph> translate_mission(const MissionDecl& m, const SCJProgram& program) {
  auto used = names_of(m.state, {m.initialize, m.cleanup}, m.methods, m.initial);
  AppBuilder b{component_id(m.name), fresh("x", used), {}, {}};
  const auto mid = const_name(b.cid);

  std::vector<ActionPtr> init_steps;
  std::vector<ActionPtr> start_steps;
  std::vector<ActionPtr> stop_steps;
  for (const auto& h : m.handlers) {
    auto hid = const_name(component_id(h.name));
    const auto* ph = find_decl<PeriodicHandlerDecl>(program, h.name);
    const auto* ah = find_decl<AperiodicHandlerDecl>(program, h.name);
    if (!ph && !ah) throw InternalError("mission " + m.name + " registers undeclared handler " + h.name);
    const auto& init = ph ? ph->initial : ah->initial;
    if (init) {
      std::vector<CommField> fields = {CommField::out(mid), CommField::out(hid)};
      for (const auto& a : h.args) fields.push_back(CommField::out(a));
      init_steps.push_back(prefix(init_call_channel(h.name), fields,
                                  prefix(init_ret_channel(h.name),
                                         {CommField::out(mid), CommField::out(hid)}, skip())));
    } else if (!h.args.empty()) {
      throw InternalError("handler " + h.name + " takes no constructor arguments");
    }
    if (ph)
      start_steps.push_back(prefix("start_peh",
                                   {CommField::out(mid), CommField::out(hid),
                                    CommField::out(expr_of_time(ph->start)),
                                    CommField::out(expr_of_time(ph->period))},
                                   skip()));
    else
      start_steps.push_back(prefix("start_apeh", {CommField::out(mid), CommField::out(hid)}, skip()));
    stop_steps.push_back(prefix("done_handler", {CommField::out(hid)}, skip()));
  }

  auto init_body = body_or_skip(m.initialize);
  for (const auto& s : init_steps) init_body = is_skip(init_body) ? s : seq(init_body, s);

  // startHandlersCall?x!MID -> start... ; startHandlersRet!x!MID!n -> Skip
  auto start_ret = prefix("startHandlersRet",
                          {CommField::out(var_name(b.x)), CommField::out(mid),
                           CommField::out(num(static_cast<std::int64_t>(m.handlers.size())))},
                          skip());
  ActionPtr start_body = start_ret;
  if (!start_steps.empty()) start_body = seq(fold_left(start_steps, seq), start_ret);
  auto start_meth = prefix("startHandlersCall", {CommField::in(b.x), CommField::out(mid)}, start_body);

  auto stop_body = stop_steps.empty() ? skip() : fold_left(stop_steps, seq);

  if (m.initial && !m.initial->params.empty()) throw InternalError("mission constructors take no parameters");
  if (m.initial) b.add("Initial", body_or_skip(m.initial->body), false);
  b.add("missionInitializeMeth",
        method("missionInitializeCall", "missionInitializeRet", b.cid, b.x, init_body));
  b.add("startHandlersMeth", start_meth);
  b.add("stopHandlersMeth", method("stopHandlersCall", "stopHandlersRet", b.cid, b.x, stop_body));
  b.add("cleanupMissionMeth",
        method("cleanupMissionCall", "cleanupMissionRet", b.cid, b.x, body_or_skip(m.cleanup)));
  b.add_aux(m.methods);
  return compose(FrameworkKind::MissionFW, m.name, m.methods,
                 b.finish(m.state, "end_mission_app", m.initial.has_value()));
}

namespace {

template <typename H>
std::vector<CircusParagraph> translate_handler(const H& h, FrameworkKind kind) {
  auto used = names_of(h.state, {h.handle_async_event}, h.methods, h.initial);
  AppBuilder b{component_id(h.name), fresh("x", used), {}, {}};
  if (h.initial) {
    // InitCall?o!HID?p1..?pn -> BODY ; InitRet!o!HID -> Skip
    auto o = fresh("o", used);
    std::vector<CommField> fields = {CommField::in(o), CommField::out(const_name(b.cid))};
    for (const auto& p : h.initial->params) fields.push_back(CommField::in(p.name));
    auto ret = prefix(init_ret_channel(h.name),
                      {CommField::out(var_name(o)), CommField::out(const_name(b.cid))}, skip());
    auto body = body_or_skip(h.initial->body);
    b.add("initialMeth",
          prefix(init_call_channel(h.name), fields, is_skip(body) ? ret : seq(body, ret)));
  }
  b.add("handleAsyncEventMeth", method("handleAsyncEventCall", "handleAsyncEventRet", b.cid, b.x,
                                       body_or_skip(h.handle_async_event)));
  b.add_aux(h.methods);
  return compose(kind, h.name, h.methods, b.finish(h.state, "end_handler_app", false));
}

}  // namespace

std::vector<CircusParagraph> translate_periodic_handler(const PeriodicHandlerDecl& h) {
  return translate_handler(h, FrameworkKind::PEHFW);
}

std::vector<CircusParagraph> translate_aperiodic_handler(const AperiodicHandlerDecl& h) {
  return translate_handler(h, FrameworkKind::APEHFW);
}

ProcessPtr application_process(const SCJProgram& p) {
  ProcessPtr safelet, sequencer;
  std::vector<ProcessPtr> missions, periodic, aperiodic;
  for (const auto& para : p) {
    auto n = paragraph_name(para);
    switch (para.index()) {
      case 0: safelet = proc_ref(n); break;
      case 1: sequencer = proc_ref(n); break;
      case 2: missions.push_back(proc_ref(n)); break;
      case 3: periodic.push_back(proc_ref(n)); break;
      case 4: aperiodic.push_back(proc_ref(n)); break;
      default: break;
    }
  }
  auto handlers = par_opt(fold_proc(periodic), chanset({"release"}), fold_proc(aperiodic));
  auto mh = cross_channels();
  for (const auto& c : init_channels(p)) mh.push_back(c);
  auto level3 = par_opt(fold_proc(missions), mh, handlers);
  auto level2 = par_opt(sequencer, chanset({"start_mission", "done_mission"}), level3);
  auto top = par_opt(safelet, chanset({"start_sequencer", "done_sequencer"}), level2);
  return top ? top : basic_process({}, {}, skip());
}

ProcessPtr framework_first_application(const SCJProgram& p) {
  ProcessPtr safelet_fw, sequencer_fw;
  std::vector<ProcessPtr> lower_fws;
  std::vector<ProcessPtr> top_apps, mission_apps, handler_apps;
  ChanSet hidden;
  for (const auto& para : p) {
    if (!is_scj(para)) continue;
    auto n = paragraph_name(para);
    auto kind = framework_kind_of(para);
    auto fw = proc_inst(to_string(kind), {const_name(component_id(n))});
    auto app = proc_ref(n + "_App");
    for (const auto& c : channel_set(kind, n, method_names(aux_methods(para)))) {
      bool dup = false;
      for (const auto& h : hidden) dup = dup || h.channel == c.channel;
      if (!dup) hidden.push_back(c);
    }
    switch (kind) {
      case FrameworkKind::SafeletFW: safelet_fw = fw; top_apps.push_back(app); break;
      case FrameworkKind::SequencerFW: sequencer_fw = fw; top_apps.push_back(app); break;
      case FrameworkKind::MissionFW: lower_fws.push_back(fw); mission_apps.push_back(app); break;
      default: lower_fws.push_back(fw); handler_apps.push_back(app); break;
    }
  }
  auto fws = par_opt(sequencer_fw, chanset({"start_mission", "done_mission"}), fold_proc(lower_fws));
  fws = par_opt(safelet_fw, chanset({"start_sequencer", "done_sequencer"}), fws);
  auto lower_apps = par_opt(fold_proc(mission_apps), init_channels(p), fold_proc(handler_apps));
  std::vector<ProcessPtr> apps = top_apps;
  if (lower_apps) apps.push_back(lower_apps);
  auto app_net = fold_proc(apps);
  if (!fws || !app_net) return basic_process({}, {}, skip());
  auto sync = hidden;
  for (const auto& c : cross_channels()) sync.push_back(c);
  sync.push_back({"release", {}});
  return proc_hide(proc_par(fws, sync, app_net), hidden);
}

TranslationOutput translate_program(const SCJProgram& p) {
  TranslationOutput out;
  bool any_scj = false;
  for (const auto& para : p) any_scj = any_scj || is_scj(para);

  if (any_scj) {
    for (const auto& d : framework_channels()) out.paragraphs.push_back(d);
    Names aux_seen;
    std::vector<std::string> aux_names;
    for (const auto& para : p)
      for (const auto& m : aux_methods(para))
        if (aux_seen.insert(m.name).second) aux_names.push_back(m.name);
    if (!aux_names.empty()) {
      ChannelDecl aux{{}, {Sort::Id, Sort::Id}, {}};
      for (const auto& n : aux_names) {
        aux.names.push_back(n + "Call");
        aux.names.push_back(n + "Ret");
      }
      out.paragraphs.push_back(aux);
    }
    for (const auto& para : p) {
      const auto& init = initial_of(para);
      if (!init) continue;
      auto n = paragraph_name(para);
      std::vector<Sort> sorts = {Sort::Id, Sort::Id};
      for (const auto& v : init->params) sorts.push_back(v.sort);
      out.paragraphs.push_back(ChannelDecl{{init_call_channel(n)}, sorts, {}});
      out.paragraphs.push_back(ChannelDecl{{init_ret_channel(n)}, {Sort::Id, Sort::Id}, {}});
    }
    IdsDecl ids;
    for (const auto& para : p)
      if (is_scj(para)) ids.names.push_back(component_id(paragraph_name(para)));
    out.paragraphs.push_back(ids);
    for (auto k : all_framework_kinds())
      out.paragraphs.push_back(ProcessDecl{to_string(k), framework_template(k), {}});
  }

  for (const auto& para : p) {
    std::vector<CircusParagraph> emitted;
    std::visit(
        [&](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, SafeletDecl>) emitted = translate_safelet(d);
          else if constexpr (std::is_same_v<T, SequencerDecl>) emitted = translate_sequencer(d);
          else if constexpr (std::is_same_v<T, MissionDecl>) emitted = translate_mission(d, p);
          else if constexpr (std::is_same_v<T, PeriodicHandlerDecl>) emitted = translate_periodic_handler(d);
          else if constexpr (std::is_same_v<T, AperiodicHandlerDecl>) emitted = translate_aperiodic_handler(d);
          else emitted = {d};
        },
        para);
    if (is_scj(para)) {
      auto n = paragraph_name(para);
      out.processes[n] = {n + "_App", n};
    }
    for (auto& e : emitted) out.paragraphs.push_back(std::move(e));
  }
  out.paragraphs.push_back(ProcessDecl{"Application", application_process(p), {}});
  return out;
}

}  // namespace scjc
