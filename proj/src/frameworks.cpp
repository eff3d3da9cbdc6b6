#include "scjc/frameworks.hpp"

#include "scjc/analysis.hpp"

namespace scjc {

namespace {

ExprPtr id() { return const_name("id"); }
CommField out_id() { return CommField::out(id()); }
CommField out_var(const std::string& v) { return CommField::out(var_name(v)); }
CommField in(const std::string& v) { return CommField::in(v); }

ActionPtr call_ret(const std::string& method, ActionPtr cont) {
  return prefix(method + "Call", {out_id(), out_id()},
                prefix(method + "Ret", {out_id(), out_id()}, std::move(cont)));
}

ActionPtr neq_null_branches(const std::string& v, ActionPtr non_null, ActionPtr on_null) {
  return guarded({{binary(BinOp::Neq, var_name(v), null_expr()), std::move(non_null)},
                  {binary(BinOp::Eq, var_name(v), null_expr()), std::move(on_null)}});
}

ProcessPtr wrap(std::vector<VarDecl> state, std::vector<ActionDef> defs, ActionPtr main) {
  return proc_param({{"id", Sort::Id}}, basic_process(std::move(state), std::move(defs), main));
}

ProcessPtr safelet_template() {
  // Execute = getSequencerCall!id!id -> getSequencerRet!id!id?s ->
  //   if s != null then start_sequencer -> done_sequencer -> Skip [] s = null then Skip fi
  auto execute = prefix(
      "getSequencerCall", {out_id(), out_id()},
      prefix("getSequencerRet", {out_id(), out_id(), in("s")},
             neq_null_branches("s", prefix("start_sequencer", {}, prefix("done_sequencer", {}, skip())),
                               skip())));
  auto main = seq(prefix("safeletInitializeCall", {out_id(), out_id()},
                         prefix("safeletInitializeRet", {out_id(), out_id()}, call("Execute"))),
                  prefix("end_safelet_app", {}, skip()));
  return wrap({}, {{"Execute", execute}}, main);
}

// NON-NORMATIVE reconstruction.
ProcessPtr sequencer_template() {
  auto body = prefix(
      "getNextMissionCall", {out_id(), out_id()},
      prefix("getNextMissionRet", {out_id(), out_id(), in("m")},
             neq_null_branches("m",
                               prefix("start_mission", {out_var("m"), out_id()},
                                      prefix("done_mission", {out_var("m")}, rec_var("X"))),
                               skip())));
  auto execute = mu("X", body);
  auto main = prefix("start_sequencer", {},
                     seq(call("Execute"),
                         prefix("end_sequencer_app", {}, prefix("done_sequencer", {}, skip()))));
  return wrap({}, {{"Execute", execute}}, main);
}

// NON-NORMATIVE reconstruction.
ProcessPtr mission_template() {
  auto await_termination = guarded(
      {{binary(BinOp::Eq, var_name("n"), num(0)), skip()},
       {binary(BinOp::Neq, var_name("n"), num(0)),
        prefix("requestTerminationCall", {in("h"), out_id()},
               prefix("requestTerminationRet", {out_var("h"), out_id()}, skip()))}});
  auto startup = call_ret(
      "missionInitialize",
      prefix("startHandlersCall", {out_id(), out_id()},
             prefix("startHandlersRet", {out_id(), out_id(), in("n")}, await_termination)));
  auto shutdown = call_ret("stopHandlers", call_ret("cleanupMission", skip()));
  auto execute = seq(startup, shutdown);
  auto main = mu("X", prefix("start_mission", {out_id(), in("q")},
                             seq(call("Execute"), prefix("done_mission", {out_id()}, rec_var("X")))));
  return wrap({}, {{"Execute", execute}}, main);
}

ProcessPtr peh_template() {
  auto hae_call = [] { return ChanRef{"handleAsyncEventCall", {id()}}; };
  auto done = [] { return ChanRef{"done_handler", {id()}}; };
  auto cycle = deadline(prefix("handleAsyncEventCall", {out_id(), out_id()},
                               prefix("handleAsyncEventRet", {out_id(), out_id()}, skip())),
                        TimeExpr::variable("period"));
  auto left = mu("X", ext_choice(seq(cycle, rec_var("X")), prefix("done_handler", {out_id()}, skip())));
  auto urgent = start_by(prefix("handleAsyncEventCall", {out_id(), out_id()},
                                wait(TimeExpr::variable("period"))),
                         TimeExpr::literal(0));
  auto right = interrupt(mu("Y", seq(urgent, rec_var("Y"))), prefix("done_handler", {out_id()}, skip()));
  auto execute = seq(wait(TimeExpr::variable("start")),
                     parallel({}, {hae_call(), done()}, {}, left, right));
  auto main = mu(
      "X", seq(seq(prefix("start_peh", {in("o"), out_id(), in("s"), in("p")},
                          seq(assign("start", var_name("s")), assign("period", var_name("p")))),
                   call("Execute")),
               rec_var("X")));
  return wrap({{"start", Sort::Nat}, {"period", Sort::Nat}}, {{"Execute", execute}}, main);
}

// NON-NORMATIVE reconstruction.
ProcessPtr apeh_template() {
  auto execute = mu("X", ext_choice(prefix("release", {out_id()},
                                           call_ret("handleAsyncEvent", rec_var("X"))),
                                    prefix("done_handler", {out_id()}, skip())));
  auto main = mu("X", prefix("start_apeh", {in("o"), out_id()}, seq(call("Execute"), rec_var("X"))));
  return wrap({}, {{"Execute", execute}}, main);
}

}  // namespace

std::string to_string(FrameworkKind k) {
  switch (k) {
    case FrameworkKind::SafeletFW: return "SafeletFW";
    case FrameworkKind::SequencerFW: return "SequencerFW";
    case FrameworkKind::MissionFW: return "MissionFW";
    case FrameworkKind::PEHFW: return "PEHFW";
    case FrameworkKind::APEHFW: return "APEHFW";
  }
  return "?";
}

const std::vector<FrameworkKind>& all_framework_kinds() {
  static const std::vector<FrameworkKind> kinds = {FrameworkKind::SafeletFW, FrameworkKind::SequencerFW,
                                                   FrameworkKind::MissionFW, FrameworkKind::PEHFW,
                                                   FrameworkKind::APEHFW};
  return kinds;
}

ProcessPtr framework_template(FrameworkKind k) {
  switch (k) {
    case FrameworkKind::SafeletFW: return safelet_template();
    case FrameworkKind::SequencerFW: return sequencer_template();
    case FrameworkKind::MissionFW: return mission_template();
    case FrameworkKind::PEHFW: return peh_template();
    case FrameworkKind::APEHFW: return apeh_template();
  }
  return nullptr;
}

ProcessPtr make_framework(FrameworkKind k, const std::string& ident) {
  auto t = framework_template(k);
  const auto& param = std::get<Process::Param>(t->node);
  return substitute_names(param.body, Bindings{{"id", const_name(ident)}});
}

ProcessPtr make_safelet_fw(const std::string& id) { return make_framework(FrameworkKind::SafeletFW, id); }
ProcessPtr make_sequencer_fw(const std::string& id) { return make_framework(FrameworkKind::SequencerFW, id); }
ProcessPtr make_mission_fw(const std::string& id) { return make_framework(FrameworkKind::MissionFW, id); }
ProcessPtr make_peh_fw(const std::string& id) { return make_framework(FrameworkKind::PEHFW, id); }
ProcessPtr make_apeh_fw(const std::string& id) { return make_framework(FrameworkKind::APEHFW, id); }

std::set<std::string> framework_interface(FrameworkKind k) {
  switch (k) {
    case FrameworkKind::SafeletFW:
      return {"safeletInitializeCall", "safeletInitializeRet", "getSequencerCall", "getSequencerRet",
              "start_sequencer", "done_sequencer", "end_safelet_app"};
    case FrameworkKind::SequencerFW:
      return {"start_sequencer", "getNextMissionCall", "getNextMissionRet", "start_mission",
              "done_mission", "end_sequencer_app", "done_sequencer"};
    case FrameworkKind::MissionFW:
      return {"start_mission",      "missionInitializeCall",  "missionInitializeRet",
              "startHandlersCall",  "startHandlersRet",       "requestTerminationCall",
              "requestTerminationRet", "stopHandlersCall",    "stopHandlersRet",
              "cleanupMissionCall", "cleanupMissionRet",      "done_mission"};
    case FrameworkKind::PEHFW:
      return {"start_peh", "handleAsyncEventCall", "handleAsyncEventRet", "done_handler"};
    case FrameworkKind::APEHFW:
      return {"start_apeh", "release", "handleAsyncEventCall", "handleAsyncEventRet", "done_handler"};
  }
  return {};
}

const std::map<std::string, std::vector<Sort>>& framework_channel_sorts() {
  static const std::map<std::string, std::vector<Sort>> sorts = [] {
    std::map<std::string, std::vector<Sort>> m;
    for (const auto& d : framework_channels())
      for (const auto& n : d.names) m[n] = d.sorts;
    return m;
  }();
  return sorts;
}

const std::vector<ChannelDecl>& framework_channels() {
  static const std::vector<ChannelDecl> decls = [] {
    const Sort I = Sort::Id, N = Sort::Nat;
    std::vector<ChannelDecl> d;
    d.push_back({{"safeletInitializeCall", "safeletInitializeRet", "getSequencerCall"}, {I, I}, {}});
    d.push_back({{"getSequencerRet"}, {I, I, I}, {}});
    d.push_back({{"start_sequencer", "done_sequencer", "end_safelet_app", "end_sequencer_app",
                  "end_mission_app", "end_handler_app"},
                 {},
                 {}});
    d.push_back({{"getNextMissionCall"}, {I, I}, {}});
    d.push_back({{"getNextMissionRet"}, {I, I, I}, {}});
    d.push_back({{"start_mission"}, {I, I}, {}});
    d.push_back({{"done_mission", "done_handler", "release"}, {I}, {}});
    d.push_back({{"missionInitializeCall", "missionInitializeRet", "startHandlersCall",
                  "stopHandlersCall", "stopHandlersRet", "cleanupMissionCall", "cleanupMissionRet",
                  "requestTerminationCall", "requestTerminationRet"},
                 {I, I},
                 {}});
    d.push_back({{"startHandlersRet"}, {I, I, N}, {}});
    d.push_back({{"start_peh"}, {I, I, N, N}, {}});
    d.push_back({{"start_apeh", "handleAsyncEventCall", "handleAsyncEventRet"}, {I, I}, {}});
    return d;
  }();
  return decls;
}

const std::set<std::string>& reserved_names() {
  static const std::set<std::string> names = [] {
    std::set<std::string> s = {"Application"};
    for (auto k : all_framework_kinds()) s.insert(to_string(k));
    for (const auto& [n, _] : framework_channel_sorts()) s.insert(n);
    return s;
  }();
  return names;
}

}  // namespace scjc
