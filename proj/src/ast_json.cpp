#include "scjc/ast_json.hpp"

namespace scjc {

using nlohmann::json;

namespace {

const char* op_text(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Concat: return "^";
    case BinOp::Eq: return "=";
    case BinOp::Neq: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "and";
    case BinOp::Or: return "or";
  }
  return "?";
}

template <typename T>
json list(const std::vector<T>& xs) {
  json a = json::array();
  for (const auto& x : xs) a.push_back(to_json(x));
  return a;
}

json decls(const std::vector<VarDecl>& ds) {
  json a = json::array();
  for (const auto& d : ds) a.push_back({{"name", d.name}, {"sort", to_string(d.sort)}});
  return a;
}

json field(const CommField& f) {
  switch (f.kind) {
    case CommField::Kind::Input: return {{"input", f.var}};
    case CommField::Kind::Output: return {{"output", to_json(f.expr)}};
    case CommField::Kind::Dot: return {{"dot", to_json(f.expr)}};
  }
  return nullptr;
}

json opt_action(const ActionPtr& a) { return a ? to_json(a) : json(nullptr); }

json methods(const std::vector<MethodDef>& ms) {
  json a = json::array();
  for (const auto& m : ms) a.push_back({{"name", m.name}, {"body", opt_action(m.body)}});
  return a;
}

json initial(const std::optional<Initial>& i) {
  if (!i) return nullptr;
  return {{"params", decls(i->params)}, {"body", opt_action(i->body)}};
}

}  // namespace

json to_json(const ExprPtr& e) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Expr::Num>) return {{"node", "num"}, {"value", x.value}};
        else if constexpr (std::is_same_v<T, Expr::Bool>) return {{"node", "bool"}, {"value", x.value}};
        else if constexpr (std::is_same_v<T, Expr::Null>) return {{"node", "null"}};
        else if constexpr (std::is_same_v<T, Expr::Name>)
          return {{"node", x.kind == NameKind::Constant ? "const" : "var"}, {"name", x.text}};
        else if constexpr (std::is_same_v<T, Expr::SeqLit>) return {{"node", "seq"}, {"items", list(x.items)}};
        else if constexpr (std::is_same_v<T, Expr::Binary>)
          return {{"node", "binary"}, {"op", op_text(x.op)}, {"lhs", to_json(x.lhs)}, {"rhs", to_json(x.rhs)}};
        else if constexpr (std::is_same_v<T, Expr::Not>) return {{"node", "not"}, {"operand", to_json(x.operand)}};
        else if constexpr (std::is_same_v<T, Expr::Member>)
          return {{"node", x.negated ? "notin" : "in"}, {"element", to_json(x.element)}, {"set", x.set}};
        else
          return {{"node", "new"}, {"kind", to_string(x.kind)}, {"type", x.type}, {"args", list(x.args)}};
      },
      e->node);
}

json to_json(const TimeExpr& t) {
  switch (t.form) {
    case TimeExpr::Form::Literal: return {{"node", "num"}, {"value", t.value}};
    case TimeExpr::Form::Named:
      return {{"node", t.kind == NameKind::Constant ? "const" : "var"}, {"name", t.name}};
    case TimeExpr::Form::Sum: return {{"node", "sum"}, {"lhs", to_json(*t.lhs)}, {"rhs", to_json(*t.rhs)}};
  }
  return nullptr;
}

json to_json(const ChanSet& cs) {
  json a = json::array();
  for (const auto& r : cs) a.push_back({{"channel", r.channel}, {"prefix", list(r.prefix)}});
  return a;
}

json to_json(const ActionPtr& a) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        auto bin = [](const char* tag, const auto& b) {
          return json{{"node", tag}, {"lhs", to_json(b.lhs)}, {"rhs", to_json(b.rhs)}};
        };
        if constexpr (std::is_same_v<T, Action::Skip>) return {{"node", "skip"}};
        else if constexpr (std::is_same_v<T, Action::Stop>) return {{"node", "stop"}};
        else if constexpr (std::is_same_v<T, Action::Hole>) return {{"node", "hole"}};
        else if constexpr (std::is_same_v<T, Action::Prefix>) {
          json fs = json::array();
          for (const auto& f : x.fields) fs.push_back(field(f));
          return {{"node", "prefix"}, {"channel", x.channel}, {"fields", fs}, {"cont", to_json(x.cont)}};
        } else if constexpr (std::is_same_v<T, Action::ExtChoice>) return bin("ext_choice", x);
        else if constexpr (std::is_same_v<T, Action::IntChoice>) return bin("int_choice", x);
        else if constexpr (std::is_same_v<T, Action::Seq>) return bin("seq", x);
        else if constexpr (std::is_same_v<T, Action::Interleave>) return bin("interleave", x);
        else if constexpr (std::is_same_v<T, Action::Interrupt>) return bin("interrupt", x);
        else if constexpr (std::is_same_v<T, Action::Parallel>)
          return {{"node", "parallel"}, {"ns1", x.ns1}, {"cs", to_json(x.cs)}, {"ns2", x.ns2},
                  {"lhs", to_json(x.lhs)}, {"rhs", to_json(x.rhs)}};
        else if constexpr (std::is_same_v<T, Action::Hide>)
          return {{"node", "hide"}, {"body", to_json(x.body)}, {"cs", to_json(x.cs)}};
        else if constexpr (std::is_same_v<T, Action::Mu>)
          return {{"node", "mu"}, {"var", x.var}, {"body", to_json(x.body)}};
        else if constexpr (std::is_same_v<T, Action::RecVar>) return {{"node", "recvar"}, {"name", x.name}};
        else if constexpr (std::is_same_v<T, Action::Call>) return {{"node", "call"}, {"name", x.name}};
        else if constexpr (std::is_same_v<T, Action::Wait>) return {{"node", "wait"}, {"duration", to_json(x.duration)}};
        else if constexpr (std::is_same_v<T, Action::WaitRange>)
          return {{"node", "wait_range"}, {"lo", to_json(x.lo)}, {"hi", to_json(x.hi)}};
        else if constexpr (std::is_same_v<T, Action::Deadline>)
          return {{"node", "endby"}, {"body", to_json(x.body)}, {"d", to_json(x.d)}};
        else if constexpr (std::is_same_v<T, Action::StartBy>)
          return {{"node", "startby"}, {"body", to_json(x.body)}, {"d", to_json(x.d)}};
        else if constexpr (std::is_same_v<T, Action::Assign>)
          return {{"node", "assign"}, {"var", x.var}, {"this", x.this_qualified}, {"value", to_json(x.value)}};
        else if constexpr (std::is_same_v<T, Action::VarBlock>)
          return {{"node", "var"}, {"decls", decls(x.decls)}, {"body", to_json(x.body)}};
        else if constexpr (std::is_same_v<T, Action::Guarded>) {
          json bs = json::array();
          for (const auto& b : x.branches) bs.push_back({{"guard", to_json(b.guard)}, {"body", to_json(b.body)}});
          return {{"node", "guarded"}, {"branches", bs}};
        } else
          return {{"node", "alloc"}, {"kind", to_string(x.kind)}, {"type", x.type}, {"args", list(x.args)}};
      },
      a->node);
}

json to_json(const ProcessPtr& p) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Process::Basic>) {
          json defs = json::array();
          for (const auto& d : x.actions) defs.push_back({{"name", d.name}, {"body", to_json(d.body)}});
          return {{"node", "basic"}, {"state", decls(x.state)}, {"actions", defs}, {"main", to_json(x.main)}};
        } else if constexpr (std::is_same_v<T, Process::Par>)
          return {{"node", "parallel"}, {"lhs", to_json(x.lhs)}, {"cs", to_json(x.cs)}, {"rhs", to_json(x.rhs)}};
        else if constexpr (std::is_same_v<T, Process::Interleave>)
          return {{"node", "interleave"}, {"lhs", to_json(x.lhs)}, {"rhs", to_json(x.rhs)}};
        else if constexpr (std::is_same_v<T, Process::Hide>)
          return {{"node", "hide"}, {"body", to_json(x.body)}, {"cs", to_json(x.cs)}};
        else if constexpr (std::is_same_v<T, Process::Param>)
          return {{"node", "param"}, {"params", decls(x.params)}, {"body", to_json(x.body)}};
        else if constexpr (std::is_same_v<T, Process::Inst>)
          return {{"node", "inst"}, {"name", x.name}, {"args", list(x.args)}};
        else
          return {{"node", "ref"}, {"name", x.name}};
      },
      p->node);
}

json to_json(const CircusParagraph& p) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ChannelDecl>) {
          json sorts = json::array();
          for (auto s : x.sorts) sorts.push_back(to_string(s));
          return {{"node", "channel"}, {"names", x.names}, {"sorts", sorts}};
        } else if constexpr (std::is_same_v<T, ConstDecl>)
          return {{"node", "const"}, {"names", x.names}};
        else if constexpr (std::is_same_v<T, IdsDecl>)
          return {{"node", "ids"}, {"names", x.names}};
        else
          return {{"node", "process"}, {"name", x.name}, {"body", to_json(x.body)}};
      },
      p);
}

json to_json(const SCJParagraph& p) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SafeletDecl>)
          return {{"node", "safelet"}, {"name", x.name}, {"state", decls(x.state)},
                  {"initialize", opt_action(x.initialize)}, {"sequencer_result", x.sequencer_result},
                  {"getSequencer", opt_action(x.get_sequencer)}, {"methods", methods(x.methods)}};
        else if constexpr (std::is_same_v<T, SequencerDecl>)
          return {{"node", "sequencer"}, {"name", x.name}, {"state", decls(x.state)},
                  {"initial", initial(x.initial)}, {"mission_result", x.mission_result},
                  {"getNextMission", opt_action(x.get_next_mission)}, {"methods", methods(x.methods)}};
        else if constexpr (std::is_same_v<T, MissionDecl>) {
          json hs = json::array();
          for (const auto& h : x.handlers) hs.push_back({{"name", h.name}, {"args", list(h.args)}});
          return {{"node", "mission"}, {"name", x.name}, {"state", decls(x.state)},
                  {"initial", initial(x.initial)}, {"initialize", opt_action(x.initialize)},
                  {"handlers", hs}, {"cleanup", opt_action(x.cleanup)}, {"methods", methods(x.methods)}};
        } else if constexpr (std::is_same_v<T, PeriodicHandlerDecl>)
          return {{"node", "periodic_handler"}, {"name", x.name}, {"start", to_json(x.start)},
                  {"period", to_json(x.period)}, {"state", decls(x.state)}, {"initial", initial(x.initial)},
                  {"handleAsyncEvent", opt_action(x.handle_async_event)}, {"methods", methods(x.methods)}};
        else if constexpr (std::is_same_v<T, AperiodicHandlerDecl>)
          return {{"node", "aperiodic_handler"}, {"name", x.name}, {"state", decls(x.state)},
                  {"initial", initial(x.initial)}, {"handleAsyncEvent", opt_action(x.handle_async_event)},
                  {"methods", methods(x.methods)}};
        else
          return to_json(x);
      },
      p);
}

json to_json(const SCJProgram& p) { return list(p); }
json to_json(const CircusProgram& p) { return list(p); }

json to_json(const Diagnostic& d) {
  return {{"severity", d.severity == Severity::Error ? "error" : "warning"},
          {"code", d.code},
          {"line", d.span.start_line},
          {"col", d.span.start_col},
          {"message", d.message}};
}

json to_json(const Event& e) {
  json payload = json::array();
  for (const auto& v : e.payload) payload.push_back(to_string(v));
  switch (e.kind) {
    case Event::Kind::Tick: return {{"kind", "tock"}};
    case Event::Kind::Internal: return {{"kind", "tau"}, {"channel", e.channel}, {"payload", payload}};
    case Event::Kind::Visible: return {{"kind", "visible"}, {"channel", e.channel}, {"payload", payload}};
  }
  return nullptr;
}

json to_json(const Verdict& v) {
  static const char* kinds[] = {"ok", "deadline_violation", "deadlock", "depth_exhausted"};
  json j = {{"verdict", kinds[static_cast<int>(v.kind)]}, {"clock", v.clock}};
  if (v.kind == Verdict::Kind::DeadlineViolation) {
    j["component"] = v.component;
    j["op"] = v.op;
  }
  return j;
}

}  // namespace scjc
