#pragma once

// Shared fixtures and hand-rolled generators for the test binaries.

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scjc/analysis.hpp"
#include "scjc/checker.hpp"
#include "scjc/frameworks.hpp"
#include "scjc/parser.hpp"
#include "scjc/printer.hpp"
#include "scjc/refine.hpp"
#include "scjc/sim.hpp"
#include "scjc/translate.hpp"

namespace testing {

using namespace scjc;

inline std::string source_path(const std::string& rel) { return std::string(SCJC_SOURCE_DIR) + "/" + rel; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline SCJProgram parse_ok(const std::string& src) {
  auto r = parse_program(src, "test");
  if (!r.value) {
    std::string msg = "parse failed:";
    for (const auto& d : r.diagnostics) msg += "\n  " + format_line(d);
    throw std::runtime_error(msg);
  }
  return *r.value;
}

inline ActionPtr action_ok(const std::string& src) {
  auto r = parse_action(src);
  if (!r.value) throw std::runtime_error("action parse failed: " + src);
  return *r.value;
}

inline SCJProgram replicator() { return parse_ok(read_text(source_path("examples/replicator.scjc"))); }

inline ConstBindings replicator_consts(std::int64_t pd = 6) {
  return {{"P", 10}, {"ID", 2}, {"PTB", 3}, {"PD", pd}, {"AD", 4}, {"ATB", 1}, {"OD", 2}};
}

/// Framework channels, the given ids, one framework template and `extra`.
inline CircusProgram framework_harness(FrameworkKind k, std::vector<std::string> ids,
                                       std::vector<CircusParagraph> extra = {}) {
  CircusProgram p;
  for (const auto& d : framework_channels()) p.push_back(d);
  p.push_back(IdsDecl{std::move(ids), {}});
  p.push_back(ProcessDecl{to_string(k), framework_template(k), {}});
  for (auto& e : extra) p.push_back(std::move(e));
  return p;
}

/// SafeletFW instantiated at SafeletID, with SequencerID as the only other id.
inline Config safelet_fw_config() {
  auto prog = framework_harness(FrameworkKind::SafeletFW, {"SafeletID", "SequencerID"},
                                {ProcessDecl{"Main", proc_inst("SafeletFW", {const_name("SafeletID")}), {}}});
  return make_config(prog, "Main", {});
}

/// PEHFW(H) started by mission M with the given start and period, beside an
/// environment that accepts every call and returns after `delay` ticks.
inline Config peh_harness(std::int64_t start, std::int64_t period, std::int64_t delay = 0) {
  auto ret = prefix("handleAsyncEventRet", {CommField::out(const_name("H")), CommField::out(const_name("H"))},
                    rec_var("X"));
  auto body = delay > 0 ? seq(wait(TimeExpr::literal(delay)), ret) : ret;
  auto env = basic_process(
      {}, {},
      prefix("start_peh",
             {CommField::out(const_name("M")), CommField::out(const_name("H")), CommField::out(num(start)),
              CommField::out(num(period))},
             mu("X", prefix("handleAsyncEventCall", {CommField::in("a"), CommField::in("b")}, body))));
  auto main = proc_par(proc_inst("PEHFW", {const_name("H")}),
                       chanset({"start_peh", "handleAsyncEventCall", "handleAsyncEventRet", "done_handler"}),
                       proc_ref("Env"));
  auto prog = framework_harness(FrameworkKind::PEHFW, {"H", "M"},
                                {ProcessDecl{"Env", env, {}}, ProcessDecl{"Main", main, {}}});
  return make_config(prog, "Main", {});
}

inline std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string l;
  while (std::getline(ss, l)) out.push_back(l);
  return out;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  int below(int n) { return static_cast<int>(g_() % static_cast<std::uint64_t>(n)); }
  bool coin(int percent = 50) { return below(100) < percent; }
  template <typename T>
  const T& one_of(const std::vector<T>& xs) { return xs[below(static_cast<int>(xs.size()))]; }

 private:
  std::mt19937_64 g_;
};

// Source text of small actions over channels `a: nat` and `go`, an
// optional nat state variable and the constant K. Every generated action
// checks clean in a scope declaring these.
class ActionTextGen {
 public:
  ActionTextGen(Rng& r, std::string nat_var) : r_(r), var_(std::move(nat_var)) {}

  std::string gen(int depth) {
    if (depth <= 0 || r_.coin(35)) return atom();
    switch (r_.below(6)) {
      case 0: return "(" + gen(depth - 1) + " ; " + gen(depth - 1) + ")";
      case 1: return "(" + gen(depth - 1) + " [] " + gen(depth - 1) + ")";
      case 2: return "(" + gen(depth - 1) + ") endby " + std::to_string(2 + r_.below(3));
      case 3: return "(" + prefix_atom() + ") startby K";
      case 4:
        if (!var_.empty())
          return "if " + var_ + " = 0 then " + gen(depth - 1) + " [] " + var_ + " != 0 then " + gen(depth - 1) +
                 " fi";
        return gen(depth - 1);
      default: return "go -> " + gen(depth - 1);
    }
  }

 private:
  std::string prefix_atom() {
    switch (r_.below(3)) {
      case 0: return "go -> Skip";
      case 1: return "a!" + std::to_string(r_.below(2)) + " -> Skip";
      default: return "a?v -> Skip";
    }
  }

  std::string atom() {
    int n = var_.empty() ? 5 : 7;
    switch (r_.below(n)) {
      case 0: return "Skip";
      case 1: return "wait " + std::to_string(r_.below(3));
      case 2: return "wait 0..K";
      case 3:
      case 4: return prefix_atom();
      case 5: return var_ + " := " + var_ + " + 1";
      default: return "a!" + var_ + " -> Skip";
    }
  }

  Rng& r_;
  std::string var_;
};

// Well-formed SCJ-Circus programs: one safelet, one sequencer, one or two
// missions and one to four handlers, with random state, constructors,
// auxiliary methods and bodies.
class ProgramGen {
 public:
  explicit ProgramGen(std::uint64_t seed) : r_(seed) {}

  std::string gen() {
    std::ostringstream os;
    os << "channel a: nat\nchannel go\nconst K, T\n\n";
    int missions = 1 + r_.below(2);
    int handlers = missions + r_.below(3);
    std::vector<std::vector<int>> owned(missions);
    for (int h = 0; h < handlers; ++h) owned[h < missions ? h : r_.below(missions)].push_back(h);
    std::vector<bool> periodic;
    for (int h = 0; h < handlers; ++h) periodic.push_back(r_.coin());
    struct Ctor {
      std::vector<std::string> params;  // "p0: nat"
      std::vector<std::string> args;
    };
    std::vector<std::optional<Ctor>> ctors(handlers);
    for (int h = 0; h < handlers; ++h) {
      if (!r_.coin(40)) continue;
      Ctor c;
      int n = r_.below(3);
      for (int i = 0; i < n; ++i) {
        bool nat = r_.coin();
        c.params.push_back("p" + std::to_string(i) + (nat ? ": nat" : ": bool"));
        c.args.push_back(nat ? std::to_string(r_.below(5)) : (r_.coin() ? "true" : "false"));
      }
      ctors[h] = c;
    }

    os << "safelet Top = begin\n" << state("ready: bool");
    os << "  initialize = " << body("") << "\n";
    os << "  getSequencer = res s @ s := ControlID\n" << aux("") << "end\n\n";

    os << "sequencer Control = begin\n  state [k: nat]\n";
    if (r_.coin()) os << "  initial = k := 0\n";
    os << "  getNextMission = res m @ if k = 0 then m := M0ID ; k := 1 [] k != 0 then m := null fi\n"
       << aux("k") << "end\n\n";

    for (int m = 0; m < missions; ++m) {
      os << "mission M" << m << " = begin\n" << state("count: nat");
      os << "  initialize = " << body("") << "\n  handlers ";
      for (std::size_t i = 0; i < owned[m].size(); ++i) {
        int h = owned[m][i];
        os << (i ? ", " : "") << "H" << h;
        if (ctors[h] && !ctors[h]->args.empty()) {
          os << "(";
          for (std::size_t j = 0; j < ctors[h]->args.size(); ++j) os << (j ? ", " : "") << ctors[h]->args[j];
          os << ")";
        }
      }
      os << "\n  cleanup = " << body("") << "\n" << aux("") << "end\n\n";
    }

    for (int h = 0; h < handlers; ++h) {
      os << (periodic[h] ? "periodic" : "aperiodic") << " handler H" << h << " = begin\n";
      if (periodic[h]) os << "  start " << time_atom(true) << " period " << time_atom(false) << "\n";
      bool with_state = r_.coin();
      if (with_state) os << "  state [n: nat]\n";
      std::string var = with_state ? "n" : "";
      if (ctors[h]) {
        os << "  initial = ";
        if (!ctors[h]->params.empty()) {
          for (std::size_t j = 0; j < ctors[h]->params.size(); ++j) os << (j ? ", " : "") << ctors[h]->params[j];
          os << " @ ";
        }
        os << (with_state && r_.coin() ? "n := 0" : body(var)) << "\n";
      }
      os << "  handleAsyncEvent = " << body(var) << "\n" << aux(var) << "end\n\n";
    }
    return os.str();
  }

 private:
  std::string state(const std::string& decl) { return r_.coin() ? "  state [" + decl + "]\n" : ""; }

  std::string body(const std::string& var) { return ActionTextGen(r_, var).gen(2); }

  std::string aux(const std::string& var) {
    static const std::vector<std::string> names = {"reset", "report", "poll"};
    std::string out;
    int n = r_.below(3);
    for (int i = 0; i < n; ++i) out += "  " + names[static_cast<std::size_t>(i)] + " = " + body(var) + "\n";
    return out;
  }

  std::string time_atom(bool may_be_zero) {
    switch (r_.below(4)) {
      case 0: return std::to_string(may_be_zero ? r_.below(3) : 1 + r_.below(5));
      case 1: return "T";
      case 2: return "(T + " + std::to_string(1 + r_.below(3)) + ")";
      default: return "K";
    }
  }

  Rng r_;
};

// Small Circus actions built directly as ASTs for refinement-law instances.
// Channels come from `chans`; variables from `vars` (nat).
class ActionAstGen {
 public:
  ActionAstGen(Rng& r, std::vector<std::string> chans, std::vector<std::string> vars)
      : r_(r), chans_(std::move(chans)), vars_(std::move(vars)) {}

  ActionPtr gen(int depth) {
    if (depth <= 0 || r_.coin(30)) return atom();
    switch (r_.below(5)) {
      case 0: return seq(gen(depth - 1), gen(depth - 1));
      case 1: return ext_choice(gen(depth - 1), gen(depth - 1));
      case 2: return int_choice(gen(depth - 1), gen(depth - 1));
      case 3: return prefix(r_.one_of(chans_), {}, gen(depth - 1));
      default: return seq(atom(), gen(depth - 1));
    }
  }

  ActionPtr atom() {
    int n = vars_.empty() ? 3 : 5;
    switch (r_.below(n)) {
      case 0: return skip();
      case 1:
      case 2: return prefix(r_.one_of(chans_), {}, skip());
      case 3: return assign(r_.one_of(vars_), num(r_.below(2)));
      default: {
        auto v = r_.one_of(vars_);
        return guarded({{binary(BinOp::Eq, var_name(v), num(0)), prefix(r_.one_of(chans_), {}, skip())},
                        {binary(BinOp::Neq, var_name(v), num(0)), prefix(r_.one_of(chans_), {}, skip())}});
      }
    }
  }

 private:
  Rng& r_;
  std::vector<std::string> chans_;
  std::vector<std::string> vars_;
};

// Law instances over small generated actions. Valid instances satisfy every
// proviso; broken ones violate exactly the proviso named in `broken`.
struct Law1Instance {
  ActionPtr context, a;
  std::string c1 = "c1", c2 = "c2";
  NameSet ns1, ns2;
  std::string broken;
};

struct Law2Instance {
  ActionPtr target;
  std::string b = "b";
  ActionPtr c;
  std::string broken;
};

class LawGen {
 public:
  explicit LawGen(std::uint64_t seed) : r_(seed) {}

  static std::vector<VarDecl> state() { return {{"x", Sort::Nat}, {"y", Sort::Nat}}; }

  Law1Instance law1(bool valid) {
    ActionAstGen f(r_, {"p", "q"}, {"x"}), g(r_, {"r", "s"}, {"y"});
    Law1Instance in;
    auto around = f.gen(2);
    switch (r_.below(4)) {
      case 0: in.context = seq(around, hole()); break;
      case 1: in.context = seq(hole(), around); break;
      case 2: in.context = prefix("p", {}, hole()); break;
      default: in.context = ext_choice(prefix("q", {}, hole()), around);
    }
    in.a = g.gen(2);
    if (r_.coin(30)) {
      in.ns1 = NameSet{"x"};
      in.ns2 = NameSet{"y"};
    }
    if (valid) return in;
    switch (r_.below(5)) {
      case 0:
        in.context = seq(assign("x", num(1)), in.context);
        in.a = seq(in.a, assign("x", num(0)));
        in.broken = "usedV(F) and usedV(A) are disjoint";
        break;
      case 1:
        in.c2 = in.c1;
        in.broken = "c1 and c2 are distinct";
        break;
      case 2:
        if (r_.coin()) in.context = seq(prefix(in.c1, {}, skip()), in.context);
        else in.a = prefix(in.c2, {}, in.a);
        in.broken = "c1 and c2 are not used in F(A)";
        break;
      case 3:
        in.context = seq(assign("x", num(1)), in.context);
        in.ns1 = NameSet{"z"};
        in.ns2 = NameSet{"y"};
        in.broken = "ns1 covers usedV(F)";
        break;
      default:
        in.context = seq(assign("x", num(1)), in.context);
        in.ns1 = NameSet{"x", "y"};
        in.ns2 = NameSet{"y"};
        in.broken = "ns1 and ns2 are disjoint";
    }
    return in;
  }

  Law2Instance law2(bool valid) {
    ActionAstGen g(r_, {"p", "q", "a"}, {});
    Law2Instance in;
    ChanSet cs = chanset({"a"});
    if (r_.coin()) cs.push_back({"p", {}});
    auto lhs = prefix("a", {}, g.gen(2)), rhs = prefix("a", {}, g.gen(2));
    in.c = ActionAstGen(r_, {"p", "q", "b"}, {}).gen(2);
    if (!valid) {
      switch (r_.below(3)) {
        case 0:
          cs = chanset({"p"});
          in.broken = "a is in the synchronisation set";
          break;
        case 1:
          if (r_.coin()) lhs = prefix("a", {}, seq(prefix("b", {}, skip()), cont_of(lhs)));
          else rhs = prefix("a", {}, ext_choice(cont_of(rhs), prefix("b", {}, skip())));
          in.broken = "b is not used in A or B";
          break;
        default:
          in.b = "a";
          in.broken = "b is not used in A or B";
      }
    }
    in.target = parallel({}, cs, {}, lhs, rhs);
    return in;
  }

 private:
  static ActionPtr cont_of(const ActionPtr& a) {
    return std::get<Action::Prefix>(a->node).cont;
  }
  Rng r_;
};

}  // namespace testing
