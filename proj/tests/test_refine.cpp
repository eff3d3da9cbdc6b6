#include <doctest.h>

#include "support.hpp"

using namespace testing;

namespace {

const std::vector<VarDecl> kXY = LawGen::state();

bool refines_both_ways(const ActionPtr& x, const ActionPtr& y, std::size_t depth) {
  return check_bounded_refinement(x, y, depth, {}, kXY).holds && check_bounded_refinement(y, x, depth, {}, kXY).holds;
}

std::string proviso_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ProvisoViolation& e) {
    return e.proviso();
  }
  return "";
}

}  // namespace

TEST_CASE("law 1 on the worked instance") {
  auto ctx = seq(assign("x", num(1)), hole());
  auto a = prefix("c", {}, skip());
  auto got = apply_law1(ctx, a, "c1", "c2");
  auto expected = hide(parallel({"x"}, chanset({"c1", "c2"}), {},
                                seq(assign("x", num(1)), prefix("c1", {}, prefix("c2", {}, skip()))),
                                seq(prefix("c1", {}, a), prefix("c2", {}, skip()))),
                       chanset({"c1", "c2"}));
  CHECK(equal(got, expected));
  CHECK(refines_both_ways(substitute(ctx, a), got, 5));
}

TEST_CASE("law 1 provisos") {
  auto ctx = seq(assign("x", num(1)), hole());
  CHECK(proviso_of([&] { apply_law1(ctx, prefix("c", {}, assign("x", num(0))), "c1", "c2"); }) ==
        "usedV(F) and usedV(A) are disjoint");
  CHECK(proviso_of([&] { apply_law1(seq(prefix("c1", {}, skip()), hole()), skip(), "c1", "c2"); }) ==
        "c1 and c2 are not used in F(A)");
  try {
    apply_law1(ctx, assign("x", num(0)), "c1", "c2");
  } catch (const ProvisoViolation& e) {
    CHECK(e.names() == std::set<std::string>{"x"});
    CHECK(std::string(e.what()).find("x") != std::string::npos);
  }
  CHECK_THROWS_AS(apply_law1(skip(), skip(), "c1", "c2"), PlaceholderCount);
  CHECK_THROWS_AS(apply_law1(seq(hole(), hole()), skip(), "c1", "c2"), PlaceholderCount);
}

TEST_CASE("law 1 on a process") {
  auto ctx = seq(assign("x", num(1)), hole());
  auto a = prefix("c", {}, skip());
  auto p = basic_process({{"x", Sort::Nat}}, {{"Other", prefix("c1", {}, skip())}}, substitute(ctx, a));
  // c1 is used elsewhere in the process
  CHECK_THROWS_AS(apply_law1(p, ctx, a, "c1", "c2"), ProvisoViolation);
  auto q = apply_law1(p, ctx, a, "k1", "k2");
  CHECK(equal(std::get<Process::Basic>(q->node).main, apply_law1(ctx, a, "k1", "k2")));
  CHECK_THROWS_AS(apply_law1(p, ctx, skip(), "k1", "k2"), ShapeMismatch);
}

TEST_CASE("law 2 on the worked instance") {
  auto lhs = prefix("start_mission", {}, prefix("done_mission", {}, skip()));
  auto target = parallel({}, chanset({"start_mission", "done_mission"}), {}, lhs, lhs);
  auto c = prefix("requestTermination", {}, skip());
  auto got = apply_law2(target, "requestTermination", c);
  auto expected = parallel({}, chanset({"start_mission", "done_mission", "requestTermination"}), {}, lhs,
                           ext_choice(lhs, prefix("requestTermination", {}, c)));
  CHECK(equal(got, expected));
  CHECK(refines_both_ways(target, got, 6));
}

TEST_CASE("law 2 provisos and shape") {
  auto side = [](const std::string& ch) { return prefix("a", {}, prefix(ch, {}, skip())); };
  CHECK(proviso_of([&] { apply_law2(parallel({}, chanset({"a"}), {}, side("b"), side("d")), "b", skip()); }) ==
        "b is not used in A or B");
  CHECK(proviso_of([&] { apply_law2(parallel({}, chanset({"d"}), {}, side("e"), side("d")), "b", skip()); }) ==
        "a is in the synchronisation set");
  CHECK_THROWS_AS(apply_law2(seq(side("d"), side("e")), "b", skip()), ShapeMismatch);
  CHECK_THROWS_AS(apply_law2(parallel({}, chanset({"a"}), {}, side("d"), prefix("e", {}, skip())), "b", skip()),
                  ShapeMismatch);

  auto main = seq(prefix("go", {}, skip()), parallel({}, chanset({"a"}), {}, side("d"), side("e")));
  auto p = basic_process({}, {}, main);
  auto q = apply_law2(p, {1}, "b", skip());
  CHECK(equal(action_at(std::get<Process::Basic>(q->node).main, {1}),
              apply_law2(action_at(main, {1}), "b", skip())));
  CHECK_THROWS_AS(apply_law2(p, {0}, "b", skip()), ShapeMismatch);
  CHECK_THROWS_AS(action_at(main, {7}), ShapeMismatch);
}

TEST_CASE("bounded refinement") {
  auto ab = action_ok("a -> Skip [] b -> Skip");
  auto a = action_ok("a -> Skip");
  CHECK(check_bounded_refinement(ab, ab, 4).holds);
  CHECK(check_bounded_refinement(ab, a, 2).holds);
  auto r = check_bounded_refinement(a, ab, 2);
  CHECK_FALSE(r.holds);
  REQUIRE(r.counterexample);
  CHECK(to_string(*r.counterexample) == "<b>");
  auto longer = check_bounded_refinement(action_ok("a -> b -> Skip"), action_ok("a -> c -> d -> Skip"), 5);
  REQUIRE(longer.counterexample);
  CHECK(to_string(*longer.counterexample) == "<a, c>");

  auto out = translate_program(replicator());
  CHECK(check_bounded_refinement(out.paragraphs, "MArea", "MArea", 3, replicator_consts()).holds);
}

TEST_CASE("law soundness on generated instances") {
  LawGen g(2024);
  for (int i = 0; i < 60; ++i) {
    auto in = g.law1(true);
    auto original = substitute(in.context, in.a);
    ActionPtr rewritten;
    REQUIRE_NOTHROW(rewritten = apply_law1(in.context, in.a, in.c1, in.c2, in.ns1, in.ns2));
    auto r = check_bounded_refinement(original, rewritten, 5, {}, kXY);
    CHECK_MESSAGE(r.holds, pretty_print(original), "\n  ", pretty_print(rewritten));
  }
  for (int i = 0; i < 60; ++i) {
    auto in = g.law2(true);
    ActionPtr rewritten;
    REQUIRE_NOTHROW(rewritten = apply_law2(in.target, in.b, in.c));
    auto r = check_bounded_refinement(in.target, rewritten, 5, {}, kXY);
    CHECK_MESSAGE(r.holds, pretty_print(in.target), "\n  ", pretty_print(rewritten));
  }
}

TEST_CASE("broken instances are rejected before rewriting") {
  LawGen g(77);
  for (int i = 0; i < 50; ++i) {
    auto in = g.law1(false);
    CHECK_MESSAGE(proviso_of([&] { apply_law1(in.context, in.a, in.c1, in.c2, in.ns1, in.ns2); }) == in.broken,
                  in.broken);
    auto two = g.law2(false);
    CHECK_MESSAGE(proviso_of([&] { apply_law2(two.target, two.b, two.c); }) == two.broken, two.broken);
  }
}

TEST_CASE("recognize inverts translate") {
  auto p = replicator();
  CHECK(equal(recognize(translate_program(p).paragraphs), p));
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    auto q = parse_ok(ProgramGen(seed).gen());
    CHECK_MESSAGE(equal(recognize(translate_program(q).paragraphs), q), seed);
  }
}

TEST_CASE("recognize rejects foreign shapes") {
  auto out = translate_program(replicator());
  auto broken = out.paragraphs;
  for (auto& para : broken)
    if (auto* d = std::get_if<ProcessDecl>(&para); d && d->name == "Mission_App")
      d->body = basic_process({}, {}, skip());
  CHECK_THROWS_AS(recognize(broken), ShapeMismatch);
  // plain Circus paragraphs pass through
  auto plain = parse_circus_program("channel c\nprocess P = begin @ c -> Skip end\n");
  REQUIRE(plain.value);
  auto back = recognize(*plain.value);
  CHECK(back.size() == 2);
}

TEST_CASE("phase pipeline on the running example") {
  // CF: separate the mission body from the sequencer with fresh start/done
  auto cf_ctx = action_ok("getNextMission -> HOLE ; end_sequencer -> Skip");
  auto mission = action_ok("initialize -> (release -> Skip [] stop -> Skip) ; cleanup -> Skip");
  auto cf = apply_law1(cf_ctx, mission, "start_mission", "done_mission");
  CHECK(refines_both_ways(substitute(cf_ctx, mission), cf, 6));

  // FW: add the termination request the application never uses
  auto par = std::get<Action::Hide>(cf->node).body;
  auto lhs = std::get<Action::Parallel>(par->node);
  auto target = parallel({}, chanset({"start_mission", "done_mission"}), {},
                         prefix("start_mission", {}, prefix("done_mission", {}, skip())),
                         prefix("start_mission", {}, prefix("done_mission", {}, skip())));
  auto fw = apply_law2(target, "requestTermination", action_ok("requestTermination -> Skip"));
  CHECK(refines_both_ways(target, fw, 6));
  CHECK(equal(lhs.rhs, seq(prefix("start_mission", {}, mission), prefix("done_mission", {}, skip()))));

  // FW to Conv: per-element composition refines the framework-first network
  auto p = replicator();
  auto out = translate_program(p);
  auto prog = out.paragraphs;
  prog.push_back(ProcessDecl{"Monolithic", framework_first_application(p), {}});
  auto r = check_bounded_refinement(prog, "Monolithic", "Application", 5, replicator_consts(),
                                    {TickMode::Visible, 200000});
  CHECK(r.holds);
  CHECK_FALSE(r.partial);

  // Conv: the SCJ-Circus paragraphs are recovered
  CHECK(equal(recognize(out.paragraphs), p));
}
