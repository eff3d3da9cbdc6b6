#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <json.hpp>
#include <sys/wait.h>

#include "support.hpp"

using namespace testing;

namespace {

struct Out {
  int code = -1;
  std::string out, err;
};

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("scjc_cli_" + std::to_string(::getpid()) + "_" + name)).string();
}

Out run_cli(const std::string& args) {
  auto err_file = tmp_path("stderr");
  std::string cmd = std::string(SCJC_BINARY) + " " + args + " 2>" + err_file;
  Out o;
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) o.out.append(buf, n);
  int status = ::pclose(p);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.err = read_text(err_file);
  std::filesystem::remove(err_file);
  return o;
}

std::string example() { return source_path("examples/replicator.scjc"); }

std::string consts(int pd = 6) {
  return "--const P=10 --const ID=2 --const PTB=3 --const PD=" + std::to_string(pd) +
         " --const AD=4 --const ATB=1 --const OD=2";
}

std::string golden(const std::string& name) { return read_text(source_path("tests/golden/" + name)); }

std::string write_tmp(const std::string& name, const std::string& text) {
  auto path = tmp_path(name);
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("parse") {
  auto empty = write_tmp("empty.scjc", "");
  auto e = run_cli("parse " + empty);
  CHECK(e.code == 0);
  CHECK(e.out == golden("empty.json"));

  auto j = run_cli("parse " + example());
  REQUIRE(j.code == 0);
  auto doc = nlohmann::json::parse(j.out);
  REQUIRE(doc.is_array());
  std::vector<std::string> tags;
  for (const auto& n : doc) tags.push_back(n.at("node").get<std::string>());
  CHECK(std::count(tags.begin(), tags.end(), "safelet") == 1);
  CHECK(std::count(tags.begin(), tags.end(), "periodic_handler") == 1);

  auto t = run_cli("parse --format text " + example());
  REQUIRE(t.code == 0);
  CHECK(equal(parse_ok(t.out), replicator()));

  auto bad = run_cli("parse " + write_tmp("bad.scjc", "periodic handler H = begin end"));
  CHECK(bad.code == 1);
  CHECK(bad.err.rfind("error E-METH ", 0) == 0);
  std::filesystem::remove(empty);
}

TEST_CASE("check") {
  auto ok = run_cli("check " + example());
  CHECK(ok.code == 0);
  CHECK(ok.out.empty());

  auto warn = run_cli("check " + example() + " " + consts(8));
  CHECK(warn.code == 0);
  CHECK(warn.out == golden("replicator_check_pd8.txt"));

  auto src = read_text(example());
  src.replace(src.find("AperiodicHandler\n  cleanup"), 16, "AperiodicHandler, Ghost");
  auto ghost = write_tmp("ghost.scjc", src);
  auto bad = run_cli("check " + ghost);
  CHECK(bad.code == 1);
  auto ls = lines(bad.out + bad.err);
  REQUIRE(ls.size() == 1);
  CHECK(ls[0].rfind("error E-REF 23:", 0) == 0);

  auto js = run_cli("--format json check " + ghost);
  CHECK(js.code == 1);
  auto doc = nlohmann::json::parse(js.out);
  REQUIRE(doc.size() == 1);
  CHECK(doc[0].at("code") == "E-REF");
  CHECK(doc[0].at("severity") == "error");
  std::filesystem::remove(ghost);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("check " + example() + " --const NOPE=1").code == 2);
  CHECK(run_cli("check " + example() + " --const P").code == 2);
  CHECK(run_cli("check " + example() + " --const P=1 --const P=2").code == 2);
  CHECK(run_cli("sim run " + example() + " --const P=10").code == 2);
  CHECK(run_cli("check /nonexistent/file.scjc").code == 2);
}

TEST_CASE("translate and frameworks dump") {
  auto t = run_cli("translate " + example());
  CHECK(t.code == 0);
  CHECK(t.out == golden("replicator.circus"));
  auto path = tmp_path("out.circus");
  CHECK(run_cli("translate " + example() + " -o " + path).code == 0);
  CHECK(read_text(path) == golden("replicator.circus"));
  std::filesystem::remove(path);

  auto f = run_cli("frameworks dump");
  CHECK(f.code == 0);
  CHECK(f.out == golden("frameworks.circus"));
}

TEST_CASE("sim") {
  auto args = "sim run " + example() + " --main System --seed 7 " + consts();
  auto a = run_cli(args), b = run_cli(args);
  CHECK(a.code == 0);
  CHECK(a.out == golden("replicator_run_seed7.txt"));
  CHECK(a.out == b.out);
  CHECK(lines(a.out).back() == "ok @t50");

  auto tr = run_cli("sim traces " + example() + " --main Safelet --depth 4 --ticks disabled " + consts());
  CHECK(tr.code == 0);
  CHECK(tr.out == golden("safelet_traces.txt"));
  auto trj = run_cli("--format json sim traces " + example() + " --main Safelet --depth 4 --ticks disabled " + consts());
  auto tdoc = nlohmann::json::parse(trj.out);
  CHECK(tdoc.at("traces").size() == lines(tr.out).size());
  CHECK(tdoc.at("partial") == false);
  auto rj = nlohmann::json::parse(run_cli("--format json " + args).out);
  CHECK(rj.at("trace").size() + 1 == lines(a.out).size());

  auto ex = run_cli("sim explore " + example() + " --main Application --max-ticks 12 " + consts(8));
  CHECK(ex.code == 1);
  CHECK(lines(ex.out).back() == "deadline_violation AperiodicHandler_App endby AD @t4");

  // translated Circus input runs the same way
  auto circus = run_cli("sim run " + source_path("tests/golden/replicator.circus") + " --main System --seed 7 " +
                     consts());
  CHECK(circus.out == a.out);
}

TEST_CASE("refine") {
  auto l1 = run_cli(R"(refine law1 --context "x := 1 ; HOLE" --action "c -> Skip" --c1 c1 --c2 c2 --verify 5)");
  CHECK(l1.code == 0);
  auto ls = lines(l1.out);
  REQUIRE(ls.size() == 1);
  CHECK(ls[0] == "(x := 1 ; c1 -> c2 -> Skip [| {x} | {| c1, c2 |} | {} |] c1 -> c -> Skip ; c2 -> Skip) \\ {| c1, c2 |}");
  CHECK(lines(l1.err) == std::vector<std::string>{"refines: yes, refined by: yes (depth 5)"});

  auto bad = run_cli(R"(refine law1 --context "x := 1 ; HOLE" --action "c -> x := 0" --c1 c1 --c2 c2)");
  CHECK(bad.code == 1);
  CHECK(bad.err.find("proviso violated: usedV(F) and usedV(A) are disjoint (x)") != std::string::npos);

  auto holes = run_cli(R"(refine law1 --context "HOLE ; HOLE" --action "c -> Skip" --c1 c1 --c2 c2)");
  CHECK(holes.code == 1);

  auto l2 = run_cli(R"(refine law2 --target "a -> d -> Skip [| {} | {| a |} | {} |] a -> e -> Skip" --b b --branch "f -> Skip" --verify 5)");
  CHECK(l2.code == 0);
  auto l2bad = run_cli(R"(refine law2 --target "a -> d -> Skip [| {} | {| d |} | {} |] a -> e -> Skip" --b b --branch "f -> Skip")");
  CHECK(l2bad.code == 1);

  auto spec = write_tmp("spec.circus", "channel a, b\nprocess P = begin @ a -> Skip end\n");
  auto impl = write_tmp("impl.circus", "channel a, b\nprocess P = begin @ a -> Skip [] b -> Skip end\n");
  auto holds = run_cli("refine check --spec " + impl + " --impl " + spec + " --spec-main P --impl-main P --depth 3");
  CHECK(holds.code == 0);
  auto fails = run_cli("refine check --spec " + spec + " --impl " + impl + " --spec-main P --impl-main P --depth 3");
  CHECK(fails.code == 1);
  CHECK(fails.err.find("<b>") != std::string::npos);
  std::filesystem::remove(spec);
  std::filesystem::remove(impl);
}
