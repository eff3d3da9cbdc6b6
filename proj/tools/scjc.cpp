// scjc: parse, check, translate, simulate and refine SCJ-Circus models.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "scjc/analysis.hpp"
#include "scjc/ast_json.hpp"
#include "scjc/checker.hpp"
#include "scjc/frameworks.hpp"
#include "scjc/parser.hpp"
#include "scjc/printer.hpp"
#include "scjc/refine.hpp"
#include "scjc/sim.hpp"
#include "scjc/translate.hpp"

using namespace scjc;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Diagnostics or a verdict have already been reported.
struct Failure {};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_circus_file(const std::string& path) { return path.ends_with(".circus"); }

void print_diagnostics(const Diagnostics& ds, const std::string& format, std::ostream& os) {
  if (format == "json") {
    json a = json::array();
    for (const auto& d : ds) a.push_back(to_json(d));
    os << a.dump(2) << "\n";
    return;
  }
  for (const auto& d : ds) os << format_line(d) << "\n";
}

template <typename T>
T take(ParseResult<T> r, const std::string& format) {
  if (!r.value) {
    print_diagnostics(r.diagnostics, format, std::cerr);
    throw Failure{};
  }
  return std::move(*r.value);
}

std::set<std::string> declared_constants(const CircusProgram& p) {
  std::set<std::string> out;
  for (const auto& para : p)
    if (auto* c = std::get_if<ConstDecl>(&para)) out.insert(c->names.begin(), c->names.end());
  return out;
}

std::set<std::string> declared_constants(const SCJProgram& p) {
  std::set<std::string> out;
  for (const auto& para : p)
    if (auto* c = std::get_if<CircusParagraph>(&para))
      if (auto* d = std::get_if<ConstDecl>(c)) out.insert(d->names.begin(), d->names.end());
  return out;
}

ConstBindings parse_consts(const std::vector<std::string>& raw, const std::set<std::string>& declared) {
  ConstBindings out;
  for (const auto& s : raw) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--const expects NAME=VALUE, got " + s);
    auto name = s.substr(0, eq);
    std::int64_t v;
    try {
      std::size_t used = 0;
      v = std::stoll(s.substr(eq + 1), &used);
      if (used != s.size() - eq - 1 || v < 0) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw UsageError("constant " + name + " needs a natural value");
    }
    if (!declared.count(name)) throw UsageError("unknown constant " + name);
    if (!out.emplace(name, v).second) throw UsageError("constant " + name + " bound twice");
  }
  return out;
}

void require_all_bound(const ConstBindings& b, const std::set<std::string>& declared) {
  for (const auto& n : declared)
    if (!b.count(n)) throw UsageError("constant " + n + " is not bound (use --const " + n + "=VALUE)");
}

// A checked Circus network: translated when the input is SCJ-Circus.
CircusProgram load_network(const std::string& path, const std::string& format) {
  auto src = read_file(path);
  if (is_circus_file(path)) {
    auto p = take(parse_circus_program(src, path), format);
    auto ds = check_circus_program(p);
    if (has_errors(ds)) {
      print_diagnostics(ds, format, std::cerr);
      throw Failure{};
    }
    return p;
  }
  auto p = take(parse_program(src, path), format);
  auto ds = check_program(p);
  if (has_errors(ds)) {
    print_diagnostics(ds, format, std::cerr);
    throw Failure{};
  }
  return translate_program(p).paragraphs;
}

Config network_config(const std::string& path, const std::string& main, const std::vector<std::string>& raw,
                      const std::string& format) {
  auto net = load_network(path, format);
  auto declared = declared_constants(net);
  auto consts = parse_consts(raw, declared);
  require_all_bound(consts, declared);
  return make_config(net, main, consts);
}

NameSet split_names(const std::string& s) {
  NameSet out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

ActionPtr action_arg(const std::string& text, const std::string& what) {
  auto r = parse_action(text);
  if (!r.value) {
    for (const auto& d : r.diagnostics) std::cerr << what << ": " << format_line(d) << "\n";
    throw Failure{};
  }
  return *r.value;
}

std::vector<VarDecl> nat_state(const ActionPtr& a, const ActionPtr& b) {
  auto names = used_variables(a);
  for (const auto& n : used_variables(b)) names.insert(n);
  std::vector<VarDecl> out;
  for (const auto& n : names) out.push_back({n, Sort::Nat});
  return out;
}

int verify_both(const ActionPtr& before, const ActionPtr& after, std::size_t depth) {
  auto state = nat_state(before, after);
  auto fwd = check_bounded_refinement(before, after, depth, {}, state);
  auto bwd = check_bounded_refinement(after, before, depth, {}, state);
  std::cerr << "refines: " << (fwd.holds ? "yes" : "no") << ", refined by: " << (bwd.holds ? "yes" : "no")
            << " (depth " << depth << ")\n";
  if (fwd.counterexample) std::cerr << "counterexample: " << to_string(*fwd.counterexample) << "\n";
  return fwd.holds ? 0 : 1;
}

// Replaces process `name` of the program in `path` and prints the result.
template <typename F>
void rewrite_process(const std::string& path, const std::string& name, F rewrite) {
  auto prog = take(parse_circus_program(read_file(path), path), "text");
  bool found = false;
  for (auto& para : prog)
    if (auto* d = std::get_if<ProcessDecl>(&para); d && d->name == name) {
      d->body = rewrite(d->body);
      found = true;
    }
  if (!found) throw UsageError("no process named " + name + " in " + path);
  std::cout << pretty_print(prog) << "\n";
}

ActionPath parse_path(const std::string& s) {
  ActionPath out;
  for (const auto& part : split_names(s == "" ? "" : s)) {
    std::stringstream ss(part);
    std::size_t i;
    if (!(ss >> i)) throw UsageError("bad action path " + s);
    out.push_back(i);
  }
  return out;
}

TickMode tick_mode(const std::string& s) {
  if (s == "visible") return TickMode::Visible;
  if (s == "elided") return TickMode::Elided;
  return TickMode::Disabled;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scjc: SCJ-Circus parser, checker, translator, simulator and refinement tool"};
  app.require_subcommand(1);
  std::string format = "text";
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "text"}));

  std::string file, main_proc = "Application";
  std::vector<std::string> consts;
  auto add_consts = [&](CLI::App* c) { c->add_option("--const", consts, "Bind a constant, NAME=VALUE"); };

  auto* parse = app.add_subcommand("parse", "Parse a model and dump its syntax tree");
  parse->add_option("file", file)->required();
  std::string parse_format = "json";
  parse->add_option("--format", parse_format, "json (syntax tree) or text (pretty-printed source)")
      ->check(CLI::IsMember({"json", "text"}));

  auto* check = app.add_subcommand("check", "Report well-formedness diagnostics");
  check->add_option("file", file)->required();
  add_consts(check);

  auto* translate = app.add_subcommand("translate", "Translate SCJ-Circus to Circus Time");
  translate->add_option("file", file)->required();
  std::string out_path;
  translate->add_option("-o,--output", out_path, "Write to a file instead of stdout");

  auto* sim = app.add_subcommand("sim", "Simulate a network");
  sim->require_subcommand(1);
  std::int64_t seed = 0, max_ticks = 50;
  std::size_t depth = 6, state_cap = 1000000;
  std::string ticks = "visible";
  auto* run_cmd = sim->add_subcommand("run", "One run under a seeded random policy");
  auto* traces_cmd = sim->add_subcommand("traces", "Bounded trace set, one trace per line");
  auto* explore_cmd = sim->add_subcommand("explore", "Exhaustive search for a deadline violation");
  for (auto* c : {run_cmd, traces_cmd, explore_cmd}) {
    c->add_option("file", file)->required();
    c->add_option("--main", main_proc, "Process to simulate");
    add_consts(c);
  }
  run_cmd->add_option("--seed", seed);
  run_cmd->add_option("--max-ticks", max_ticks);
  explore_cmd->add_option("--max-ticks", max_ticks);
  explore_cmd->add_option("--state-cap", state_cap);
  traces_cmd->add_option("--depth", depth);
  traces_cmd->add_option("--ticks", ticks, "visible, elided or disabled")
      ->check(CLI::IsMember({"visible", "elided", "disabled"}));
  traces_cmd->add_option("--state-cap", state_cap);

  auto* refine = app.add_subcommand("refine", "Refinement laws and bounded refinement checks");
  refine->require_subcommand(1);
  std::string context, action, c1, c2, ns1, ns2, target, b, branch, process, path;
  std::size_t verify = 0;
  auto* law1 = refine->add_subcommand("law1", "Parallelism introduction");
  law1->add_option("--context", context, "Context with one HOLE")->required();
  law1->add_option("--action", action, "Action filling the hole")->required();
  law1->add_option("--c1", c1)->required();
  law1->add_option("--c2", c2)->required();
  law1->add_option("--ns1", ns1, "Comma-separated names of the context");
  law1->add_option("--ns2", ns2, "Comma-separated names of the action");
  auto* law2 = refine->add_subcommand("law2", "Unused behaviour introduction");
  law2->add_option("--target", target, "Parallel action a -> A [| ns1 | cs | ns2 |] a -> B");
  law2->add_option("--b", b)->required();
  law2->add_option("--branch", branch, "Action C guarded by b")->required();
  law2->add_option("--path", path, "Comma-separated child indices of the target in the process main action");
  for (auto* c : {law1, law2}) {
    c->add_option("--file", file, "Circus file holding the process to rewrite");
    c->add_option("--process", process, "Basic process whose main action is rewritten");
    c->add_option("--verify", verify, "Check both refinement directions to this depth");
  }
  std::string spec_file, impl_file, spec_main = "Application", impl_main = "Application";
  auto* rcheck = refine->add_subcommand("check", "Bounded trace refinement spec [= impl");
  rcheck->add_option("--spec", spec_file)->required();
  rcheck->add_option("--impl", impl_file)->required();
  rcheck->add_option("--spec-main", spec_main);
  rcheck->add_option("--impl-main", impl_main);
  rcheck->add_option("--depth", depth);
  rcheck->add_option("--ticks", ticks)->check(CLI::IsMember({"visible", "elided", "disabled"}));
  add_consts(rcheck);

  auto* fw = app.add_subcommand("frameworks", "Framework processes");
  fw->require_subcommand(1);
  auto* dump = fw->add_subcommand("dump", "Print framework channels and process templates");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*parse) {
      auto src = read_file(file);
      if (is_circus_file(file)) {
        auto p = take(parse_circus_program(src, file), format);
        std::cout << (parse_format == "json" ? to_json(p).dump(2) : pretty_print(p)) << "\n";
      } else {
        auto p = take(parse_program(src, file), format);
        std::cout << (parse_format == "json" ? to_json(p).dump(2) : pretty_print(p)) << "\n";
      }
      return 0;
    }

    if (*check) {
      auto src = read_file(file);
      Diagnostics ds;
      if (is_circus_file(file)) {
        auto p = take(parse_circus_program(src, file), format);
        parse_consts(consts, declared_constants(p));
        ds = check_circus_program(p);
      } else {
        auto p = take(parse_program(src, file), format);
        auto bound = parse_consts(consts, declared_constants(p));
        ds = check_program(p);
        if (!bound.empty() && !has_errors(ds))
          for (auto& d : check_timing_conditions(p, bound)) ds.push_back(std::move(d));
      }
      if (!ds.empty() || format == "json") print_diagnostics(ds, format, std::cout);
      return has_errors(ds) ? 1 : 0;
    }

    if (*translate) {
      auto p = take(parse_program(read_file(file), file), format);
      auto ds = check_program(p);
      if (has_errors(ds)) {
        print_diagnostics(ds, format, std::cerr);
        return 1;
      }
      auto text = pretty_print(translate_program(p).paragraphs) + "\n";
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(out_path);
        if (!out) throw UsageError("cannot write " + out_path);
        out << text;
      }
      return 0;
    }

    if (*run_cmd) {
      auto c0 = network_config(file, main_proc, consts, format);
      auto r = run(c0, Policy::random(static_cast<std::uint64_t>(seed)), max_ticks);
      if (format == "json") {
        json tr = json::array();
        for (const auto& te : r.trace) {
          auto j = to_json(te.event);
          j["clock"] = te.clock;
          tr.push_back(j);
        }
        std::cout << json{{"trace", tr}, {"verdict", to_json(r.verdict)}}.dump(2) << "\n";
      } else {
        for (const auto& te : r.trace) std::cout << "@t" << te.clock << " " << to_string(te.event) << "\n";
        std::cout << to_string(r.verdict) << "\n";
      }
      return r.verdict.kind == Verdict::Kind::Ok ? 0 : 1;
    }

    if (*traces_cmd) {
      auto c0 = network_config(file, main_proc, consts, format);
      auto ts = enumerate_traces(c0, depth, {tick_mode(ticks), state_cap});
      if (format == "json") {
        json a = json::array();
        for (const auto& t : ts.traces) {
          json evs = json::array();
          for (const auto& e : t) evs.push_back(to_string(e));
          a.push_back(evs);
        }
        std::cout << json{{"traces", a}, {"partial", ts.partial}}.dump(2) << "\n";
      } else {
        for (const auto& t : ts.traces) std::cout << to_string(t) << "\n";
      }
      if (ts.partial) std::cerr << "state cap reached: trace set is partial\n";
      return 0;
    }

    if (*explore_cmd) {
      auto c0 = network_config(file, main_proc, consts, format);
      auto r = explore(c0, max_ticks, state_cap);
      if (format == "json") {
        json w = nullptr;
        if (r.witness) {
          w = json::array();
          for (const auto& e : *r.witness) w.push_back(to_string(e));
        }
        std::cout << json{{"witness", w}, {"verdict", to_json(r.verdict)}, {"states", r.states}}.dump(2) << "\n";
      } else {
        if (r.witness) std::cout << to_string(*r.witness) << "\n";
        std::cout << to_string(r.verdict) << "\n";
      }
      return r.verdict.kind == Verdict::Kind::DeadlineViolation ? 1 : 0;
    }

    if (*law1) {
      auto ctx = action_arg(context, "--context");
      auto a = action_arg(action, "--action");
      auto n1 = split_names(ns1), n2 = split_names(ns2);
      if (!process.empty()) {
        if (file.empty()) throw UsageError("--process needs --file");
        rewrite_process(file, process, [&](const ProcessPtr& p) { return apply_law1(p, ctx, a, c1, c2, n1, n2); });
        return 0;
      }
      auto rhs = apply_law1(ctx, a, c1, c2, n1, n2);
      std::cout << pretty_print(rhs) << "\n";
      return verify ? verify_both(substitute(ctx, a), rhs, verify) : 0;
    }

    if (*law2) {
      auto c = action_arg(branch, "--branch");
      if (!process.empty()) {
        if (file.empty()) throw UsageError("--process needs --file");
        auto p = parse_path(path);
        rewrite_process(file, process, [&](const ProcessPtr& proc) { return apply_law2(proc, p, b, c); });
        return 0;
      }
      if (target.empty()) throw UsageError("law2 needs --target, or --file with --process");
      auto t = action_arg(target, "--target");
      auto rhs = apply_law2(t, b, c);
      std::cout << pretty_print(rhs) << "\n";
      return verify ? verify_both(t, rhs, verify) : 0;
    }

    if (*rcheck) {
      auto s = load_network(spec_file, format);
      auto i = load_network(impl_file, format);
      auto declared = declared_constants(s);
      for (const auto& n : declared_constants(i)) declared.insert(n);
      auto bound = parse_consts(consts, declared);
      require_all_bound(bound, declared);
      auto r = check_bounded_refinement(make_config(s, spec_main, bound), make_config(i, impl_main, bound), depth,
                                        {tick_mode(ticks), 1000000});
      if (r.partial) std::cerr << "state cap reached: result is partial\n";
      if (!r.holds) {
        std::cerr << "counterexample: " << to_string(*r.counterexample) << "\n";
        return 1;
      }
      return 0;
    }

    if (*dump) {
      CircusProgram p;
      for (const auto& d : framework_channels()) p.push_back(d);
      for (auto k : all_framework_kinds()) p.push_back(ProcessDecl{to_string(k), framework_template(k), {}});
      std::cout << pretty_print(p) << "\n";
      return 0;
    }
  } catch (const Failure&) {
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ProvisoViolation& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const ShapeMismatch& e) {
    std::cerr << "shape mismatch: " << e.what() << "\n";
    return 1;
  } catch (const PlaceholderCount& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const SimError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
