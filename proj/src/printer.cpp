#include "scjc/printer.hpp"

#include <sstream>

namespace scjc {

namespace {

// Action precedence, loosest first.
enum Level { kBinder = 0, kPar, kChoice, kInterrupt, kSeq, kTimed, kHide, kPrefix, kAtom };

// Expression precedence.
enum ELevel { eOr = 1, eAnd, eNot, eCmp, eAdd, eAtom };

ELevel expr_level(const Expr& e) {
  if (auto* b = std::get_if<Expr::Binary>(&e.node)) {
    switch (b->op) {
      case BinOp::Or: return eOr;
      case BinOp::And: return eAnd;
      case BinOp::Add:
      case BinOp::Sub:
      case BinOp::Concat: return eAdd;
      default: return eCmp;
    }
  }
  if (std::holds_alternative<Expr::Not>(e.node)) return eNot;
  if (std::holds_alternative<Expr::Member>(e.node)) return eCmp;
  return eAtom;
}

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

void print_expr(std::ostream& os, const ExprPtr& e, int min_level);

void print_args(std::ostream& os, const std::vector<ExprPtr>& args) {
  os << '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) os << ", ";
    print_expr(os, args[i], eOr);
  }
  os << ')';
}

void print_expr(std::ostream& os, const ExprPtr& e, int min_level) {
  ELevel lvl = expr_level(*e);
  bool paren = lvl < min_level;
  if (paren) os << '(';
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Expr::Num>) {
          os << x.value;
        } else if constexpr (std::is_same_v<T, Expr::Bool>) {
          os << (x.value ? "true" : "false");
        } else if constexpr (std::is_same_v<T, Expr::Null>) {
          os << "null";
        } else if constexpr (std::is_same_v<T, Expr::Name>) {
          os << x.text;
        } else if constexpr (std::is_same_v<T, Expr::SeqLit>) {
          os << '<';
          for (std::size_t i = 0; i < x.items.size(); ++i) {
            if (i) os << ", ";
            print_expr(os, x.items[i], eAdd);
          }
          os << '>';
        } else if constexpr (std::is_same_v<T, Expr::Binary>) {
          if (lvl == eCmp) {
            print_expr(os, x.lhs, eAdd);
            os << ' ' << op_text(x.op) << ' ';
            print_expr(os, x.rhs, eAdd);
          } else {
            print_expr(os, x.lhs, lvl);
            os << ' ' << op_text(x.op) << ' ';
            print_expr(os, x.rhs, lvl + 1);
          }
        } else if constexpr (std::is_same_v<T, Expr::Not>) {
          os << "not ";
          print_expr(os, x.operand, eNot);
        } else if constexpr (std::is_same_v<T, Expr::Member>) {
          print_expr(os, x.element, eAdd);
          os << (x.negated ? " notin " : " in ") << x.set;
        } else {
          os << to_string(x.kind) << ' ' << x.type;
          print_args(os, x.args);
        }
      },
      e->node);
  if (paren) os << ')';
}

void print_time(std::ostream& os, const TimeExpr& t, bool as_operand) {
  switch (t.form) {
    case TimeExpr::Form::Literal: os << t.value; return;
    case TimeExpr::Form::Named: os << t.name; return;
    case TimeExpr::Form::Sum:
      if (as_operand) os << '(';
      print_time(os, *t.lhs, false);
      os << " + ";
      print_time(os, *t.rhs, true);
      if (as_operand) os << ')';
      return;
  }
}

void print_chanset(std::ostream& os, const ChanSet& cs) {
  os << "{|";
  for (std::size_t i = 0; i < cs.size(); ++i) {
    os << (i ? ", " : " ");
    os << cs[i].channel;
    for (const auto& e : cs[i].prefix) {
      os << '.';
      print_expr(os, e, eAtom);
    }
  }
  os << (cs.empty() ? "|}" : " |}");
}

void print_nameset(std::ostream& os, const NameSet& ns) {
  os << '{';
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (i) os << ", ";
    os << ns[i];
  }
  os << '}';
}

void print_decls(std::ostream& os, const std::vector<VarDecl>& ds) {
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (i) os << ", ";
    os << ds[i].name << ": " << to_string(ds[i].sort);
  }
}

Level action_level(const Action& a) {
  return std::visit(
      [](const auto& x) -> Level {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Action::Mu> || std::is_same_v<T, Action::VarBlock>)
          return kBinder;
        else if constexpr (std::is_same_v<T, Action::Parallel> ||
                           std::is_same_v<T, Action::Interleave>)
          return kPar;
        else if constexpr (std::is_same_v<T, Action::ExtChoice> ||
                           std::is_same_v<T, Action::IntChoice>)
          return kChoice;
        else if constexpr (std::is_same_v<T, Action::Interrupt>)
          return kInterrupt;
        else if constexpr (std::is_same_v<T, Action::Seq>)
          return kSeq;
        else if constexpr (std::is_same_v<T, Action::Deadline> || std::is_same_v<T, Action::StartBy>)
          return kTimed;
        else if constexpr (std::is_same_v<T, Action::Hide>)
          return kHide;
        else if constexpr (std::is_same_v<T, Action::Prefix>)
          return kPrefix;
        else
          return kAtom;
      },
      a.node);
}

// A prefix under a postfix operator is parenthesised for readability:
// `(c -> Skip) endby d`.
int postfix_operand_level(const ActionPtr& body, Level own) {
  return action_level(*body) == kPrefix ? kAtom : own;
}

void print_action(std::ostream& os, const ActionPtr& a, int min_level) {
  Level lvl = action_level(*a);
  bool paren = lvl < min_level;
  if (paren) os << '(';
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Action::Skip>) {
          os << "Skip";
        } else if constexpr (std::is_same_v<T, Action::Stop>) {
          os << "Stop";
        } else if constexpr (std::is_same_v<T, Action::Hole>) {
          os << "HOLE";
        } else if constexpr (std::is_same_v<T, Action::Prefix>) {
          os << x.channel;
          for (const auto& f : x.fields) {
            switch (f.kind) {
              case CommField::Kind::Input: os << '?' << f.var; break;
              case CommField::Kind::Output: os << '!'; print_expr(os, f.expr, eAtom); break;
              case CommField::Kind::Dot: os << '.'; print_expr(os, f.expr, eAtom); break;
            }
          }
          os << " -> ";
          print_action(os, x.cont, kPrefix);
        } else if constexpr (std::is_same_v<T, Action::ExtChoice> ||
                             std::is_same_v<T, Action::IntChoice> ||
                             std::is_same_v<T, Action::Seq> ||
                             std::is_same_v<T, Action::Interrupt> ||
                             std::is_same_v<T, Action::Interleave>) {
          const char* op = std::is_same_v<T, Action::ExtChoice>   ? " [] "
                           : std::is_same_v<T, Action::IntChoice> ? " |~| "
                           : std::is_same_v<T, Action::Seq>       ? " ; "
                           : std::is_same_v<T, Action::Interrupt> ? " /\\ "
                                                                  : " ||| ";
          print_action(os, x.lhs, lvl);
          os << op;
          print_action(os, x.rhs, lvl + 1);
        } else if constexpr (std::is_same_v<T, Action::Parallel>) {
          print_action(os, x.lhs, lvl);
          os << " [| ";
          print_nameset(os, x.ns1);
          os << " | ";
          print_chanset(os, x.cs);
          os << " | ";
          print_nameset(os, x.ns2);
          os << " |] ";
          print_action(os, x.rhs, lvl + 1);
        } else if constexpr (std::is_same_v<T, Action::Hide>) {
          print_action(os, x.body, postfix_operand_level(x.body, kHide));
          os << " \\ ";
          print_chanset(os, x.cs);
        } else if constexpr (std::is_same_v<T, Action::Mu>) {
          os << "mu " << x.var << " @ ";
          print_action(os, x.body, kBinder);
        } else if constexpr (std::is_same_v<T, Action::VarBlock>) {
          os << "var ";
          print_decls(os, x.decls);
          os << " @ ";
          print_action(os, x.body, kBinder);
        } else if constexpr (std::is_same_v<T, Action::RecVar> || std::is_same_v<T, Action::Call>) {
          os << x.name;
        } else if constexpr (std::is_same_v<T, Action::Wait>) {
          os << "wait ";
          print_time(os, x.duration, true);
        } else if constexpr (std::is_same_v<T, Action::WaitRange>) {
          os << "wait ";
          print_time(os, x.lo, true);
          os << "..";
          print_time(os, x.hi, true);
        } else if constexpr (std::is_same_v<T, Action::Deadline> ||
                             std::is_same_v<T, Action::StartBy>) {
          print_action(os, x.body, postfix_operand_level(x.body, kTimed));
          os << (std::is_same_v<T, Action::Deadline> ? " endby " : " startby ");
          print_time(os, x.d, true);
        } else if constexpr (std::is_same_v<T, Action::Assign>) {
          if (x.this_qualified) os << "this.";
          os << x.var << " := ";
          print_expr(os, x.value, eOr);
        } else if constexpr (std::is_same_v<T, Action::Guarded>) {
          os << "if ";
          for (std::size_t i = 0; i < x.branches.size(); ++i) {
            if (i) os << " [] ";
            print_expr(os, x.branches[i].guard, eOr);
            os << " then ";
            print_action(os, x.branches[i].body, kInterrupt);
          }
          os << " fi";
        } else if constexpr (std::is_same_v<T, Action::Alloc>) {
          os << to_string(x.kind) << ' ' << x.type;
          print_args(os, x.args);
        }
      },
      a->node);
  if (paren) os << ')';
}

// Process precedence: binder(0) < parallel(1) < hiding(2) < atom(3).
int process_level(const Process& p) {
  if (std::holds_alternative<Process::Param>(p.node)) return 0;
  if (std::holds_alternative<Process::Par>(p.node) ||
      std::holds_alternative<Process::Interleave>(p.node))
    return 1;
  if (std::holds_alternative<Process::Hide>(p.node)) return 2;
  return 3;
}

void print_process(std::ostream& os, const ProcessPtr& p, int min_level, const std::string& indent) {
  int lvl = process_level(*p);
  bool paren = lvl < min_level;
  if (paren) os << '(';
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Process::Basic>) {
          std::string in = indent + "  ";
          os << "begin\n";
          if (!x.state.empty()) {
            os << in << "state [";
            print_decls(os, x.state);
            os << "]\n";
          }
          for (const auto& d : x.actions) {
            os << in << d.name << " = ";
            print_action(os, d.body, kBinder);
            os << '\n';
          }
          os << in << "@ ";
          print_action(os, x.main, kBinder);
          os << '\n' << indent << "end";
        } else if constexpr (std::is_same_v<T, Process::Par>) {
          print_process(os, x.lhs, 1, indent);
          os << " [| ";
          print_chanset(os, x.cs);
          os << " |] ";
          print_process(os, x.rhs, 2, indent);
        } else if constexpr (std::is_same_v<T, Process::Interleave>) {
          print_process(os, x.lhs, 1, indent);
          os << " ||| ";
          print_process(os, x.rhs, 2, indent);
        } else if constexpr (std::is_same_v<T, Process::Hide>) {
          print_process(os, x.body, 2, indent);
          os << " \\ ";
          print_chanset(os, x.cs);
        } else if constexpr (std::is_same_v<T, Process::Param>) {
          print_decls(os, x.params);
          os << " @ ";
          print_process(os, x.body, 0, indent);
        } else if constexpr (std::is_same_v<T, Process::Inst>) {
          os << x.name;
          print_args(os, x.args);
        } else {
          os << x.name;
        }
      },
      p->node);
  if (paren) os << ')';
}

void print_names(std::ostream& os, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) os << ", ";
    os << names[i];
  }
}

void print_circus(std::ostream& os, const CircusParagraph& p) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ChannelDecl>) {
          os << "channel ";
          print_names(os, x.names);
          if (!x.sorts.empty()) {
            os << ": ";
            for (std::size_t i = 0; i < x.sorts.size(); ++i) {
              if (i) os << '.';
              os << to_string(x.sorts[i]);
            }
          }
        } else if constexpr (std::is_same_v<T, ConstDecl>) {
          os << "const ";
          print_names(os, x.names);
        } else if constexpr (std::is_same_v<T, IdsDecl>) {
          os << "ids ";
          print_names(os, x.names);
        } else {
          os << "process " << x.name << " = ";
          print_process(os, x.body, 0, "");
        }
      },
      p);
}

void print_clause(std::ostream& os, const std::string& name, const ActionPtr& body) {
  os << "  " << name << " = ";
  print_action(os, body, kBinder);
  os << '\n';
}

void print_state(std::ostream& os, const std::vector<VarDecl>& state) {
  if (state.empty()) return;
  os << "  state [";
  print_decls(os, state);
  os << "]\n";
}

void print_initial(std::ostream& os, const std::optional<Initial>& init) {
  if (!init) return;
  os << "  initial = ";
  if (!init->params.empty()) {
    print_decls(os, init->params);
    os << " @ ";
  }
  print_action(os, init->body, kBinder);
  os << '\n';
}

void print_methods(std::ostream& os, const std::vector<MethodDef>& ms) {
  for (const auto& m : ms) print_clause(os, m.name, m.body);
}

void print_scj(std::ostream& os, const SCJParagraph& p) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, CircusParagraph>) {
          print_circus(os, x);
        } else if constexpr (std::is_same_v<T, SafeletDecl>) {
          os << "safelet " << x.name << " = begin\n";
          print_state(os, x.state);
          print_methods(os, x.methods);
          print_clause(os, "initialize", x.initialize);
          os << "  getSequencer = res " << x.sequencer_result << " @ ";
          print_action(os, x.get_sequencer, kBinder);
          os << "\nend";
        } else if constexpr (std::is_same_v<T, SequencerDecl>) {
          os << "sequencer " << x.name << " = begin\n";
          print_state(os, x.state);
          print_initial(os, x.initial);
          print_methods(os, x.methods);
          os << "  getNextMission = res " << x.mission_result << " @ ";
          print_action(os, x.get_next_mission, kBinder);
          os << "\nend";
        } else if constexpr (std::is_same_v<T, MissionDecl>) {
          os << "mission " << x.name << " = begin\n";
          print_state(os, x.state);
          print_initial(os, x.initial);
          print_methods(os, x.methods);
          print_clause(os, "initialize", x.initialize);
          if (!x.handlers.empty()) {
            os << "  handlers ";
            for (std::size_t i = 0; i < x.handlers.size(); ++i) {
              if (i) os << ", ";
              os << x.handlers[i].name;
              if (!x.handlers[i].args.empty()) print_args(os, x.handlers[i].args);
            }
            os << '\n';
          }
          print_clause(os, "cleanup", x.cleanup);
          os << "end";
        } else if constexpr (std::is_same_v<T, PeriodicHandlerDecl>) {
          os << "periodic handler " << x.name << " = begin\n  start ";
          print_time(os, x.start, true);
          os << " period ";
          print_time(os, x.period, true);
          os << '\n';
          print_state(os, x.state);
          print_initial(os, x.initial);
          print_methods(os, x.methods);
          print_clause(os, "handleAsyncEvent", x.handle_async_event);
          os << "end";
        } else {
          os << "aperiodic handler " << x.name << " = begin\n";
          print_state(os, x.state);
          print_initial(os, x.initial);
          print_methods(os, x.methods);
          print_clause(os, "handleAsyncEvent", x.handle_async_event);
          os << "end";
        }
      },
      p);
}

}  // namespace

std::string pretty_print(const ExprPtr& e) {
  std::ostringstream os;
  print_expr(os, e, eOr);
  return os.str();
}

std::string pretty_print(const TimeExpr& t) {
  std::ostringstream os;
  print_time(os, t, false);
  return os.str();
}

std::string pretty_print(const ChanSet& cs) {
  std::ostringstream os;
  print_chanset(os, cs);
  return os.str();
}

std::string pretty_print(const ActionPtr& a) {
  std::ostringstream os;
  print_action(os, a, kBinder);
  return os.str();
}

std::string pretty_print(const ProcessPtr& p) {
  std::ostringstream os;
  print_process(os, p, 0, "");
  return os.str();
}

std::string pretty_print(const CircusParagraph& p) {
  std::ostringstream os;
  print_circus(os, p);
  return os.str();
}

std::string pretty_print(const SCJParagraph& p) {
  std::ostringstream os;
  print_scj(os, p);
  return os.str();
}

std::string pretty_print(const SCJProgram& prog) {
  std::ostringstream os;
  for (std::size_t i = 0; i < prog.size(); ++i) {
    if (i) os << '\n';
    print_scj(os, prog[i]);
    os << '\n';
  }
  return os.str();
}

std::string pretty_print(const CircusProgram& prog) {
  std::ostringstream os;
  for (std::size_t i = 0; i < prog.size(); ++i) {
    if (i) os << '\n';
    print_circus(os, prog[i]);
    os << '\n';
  }
  return os.str();
}

}  // namespace scjc
