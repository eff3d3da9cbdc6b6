#include <doctest.h>

#include "support.hpp"

using namespace testing;

namespace {

const std::vector<ChannelDecl> kChans = {{{"a"}, {Sort::Nat}, {}}, {{"b", "c", "go"}, {}, {}}};

Config cfg(const std::string& src, const SimOptions& o = {}) {
  return make_action_config(*parse_action(src, {{"K"}, {"n"}}).value, kChans, {{"n", Sort::Nat}}, {{"K", 2}}, {},
                            o);
}

bool has_tick(const std::vector<Event>& es) {
  for (const auto& e : es)
    if (e.kind == Event::Kind::Tick) return true;
  return false;
}

std::set<std::string> rendered(const TraceSet& ts) {
  std::set<std::string> out;
  for (const auto& t : ts.traces) out.insert(to_string(t));
  return out;
}

}  // namespace

TEST_CASE("wait lets time pass and nothing else") {
  auto c = cfg("wait 3");
  CHECK(enabled(c) == std::vector<Event>{Event::tick()});
  for (int i = 0; i < 3; ++i) {
    CHECK_FALSE(c.terminated());
    c = step(c, Event::tick());
  }
  CHECK(c.terminated());
  CHECK(c.clock == 3);
}

TEST_CASE("time additivity") {
  for (int n = 0; n <= 8; ++n) {
    auto c = cfg("wait " + std::to_string(n));
    int ticks = 0;
    while (!c.terminated()) {
      auto es = enabled(c);
      for (const auto& e : es) CHECK(e.kind != Event::Kind::Visible);
      c = step(c, es.front());
      ticks += es.front().kind == Event::Kind::Tick;
    }
    CHECK(ticks == n);
    CHECK(c.clock == n);
  }
}

TEST_CASE("zero wait and Skip") {
  auto r = run(cfg("wait 0"), Policy::random(1), 10);
  CHECK(r.verdict.kind == Verdict::Kind::Ok);
  CHECK(r.final.clock == 0);
  auto s = run(cfg("Skip"), Policy::random(1), 10);
  CHECK(s.trace.empty());
  CHECK(s.verdict.kind == Verdict::Kind::Ok);
  CHECK(s.verdict.clock == 0);
  CHECK(to_string(s.verdict) == "ok @t0");
}

TEST_CASE("hidden events are urgent") {
  auto es = enabled(cfg("(c -> Skip) \\ {| c |}"));
  REQUIRE(es.size() == 1);
  CHECK(es[0].kind == Event::Kind::Internal);
  CHECK_FALSE(has_tick(es));
}

TEST_CASE("illegal steps are rejected") {
  CHECK_THROWS_AS(step(cfg("go -> Skip"), Event::visible("b")), IllegalStep);
  CHECK_THROWS_AS(step(cfg("a!1 -> Skip"), Event::visible("a", {Value::of_nat(0)})), IllegalStep);
  CHECK_NOTHROW(step(cfg("a?x -> Skip"), Event::visible("a", {Value::of_nat(1)})));
}

TEST_CASE("event identity ignores the transition location") {
  auto e = Event::visible("go");
  auto f = e;
  f.via = "0.1.2";
  CHECK(e == f);
  CHECK_FALSE(e < f);
  CHECK_FALSE(f < e);
  CHECK(to_string(Event::visible("a", {Value::of_nat(3)})) == "a.3");
  CHECK(to_string(Event::tick()) == "tock");
}

TEST_CASE("small trace sets") {
  CHECK(rendered(enumerate_traces(cfg("Skip"), 5, {TickMode::Disabled})) == std::set<std::string>{"<>"});
  // a terminated process lets time pass like any idle one
  CHECK(rendered(enumerate_traces(cfg("Skip"), 2)) == std::set<std::string>{"<>", "<tock>", "<tock, tock>"});
  CHECK(rendered(enumerate_traces(cfg("b -> Skip [] c -> Skip"), 1, {TickMode::Disabled})) ==
        std::set<std::string>{"<>", "<b>", "<c>"});
  // a range wait resolves to any duration in the range
  auto ts = rendered(enumerate_traces(cfg("wait 1..3 ; go -> Skip"), 4));
  for (const char* t : {"<tock, go>", "<tock, tock, go>", "<tock, tock, tock, go>"}) CHECK(ts.count(t));
  CHECK_FALSE(ts.count("<go>"));
  // ticks do not resolve an external choice
  auto ch = rendered(enumerate_traces(cfg("b -> Skip [] wait 1 ; c -> Skip"), 3));
  CHECK(ch.count("<tock, b>"));
  CHECK(ch.count("<tock, c>"));
}

TEST_CASE("deadlines are closed") {
  CHECK(explore(cfg("(wait 2) endby 2"), 10).verdict.kind == Verdict::Kind::Ok);
  auto late = explore(cfg("(wait 3) endby 2"), 10);
  CHECK(late.verdict.kind == Verdict::Kind::DeadlineViolation);
  CHECK(late.verdict.clock == 2);
  CHECK(late.verdict.op == "endby 2");
  REQUIRE(late.witness);
  CHECK(to_string(*late.witness) == "<tock, tock>");

  CHECK(explore(cfg("wait 1 ; (go -> Skip) startby 0"), 5).verdict.kind == Verdict::Kind::Ok);
  auto start = enabled(step(cfg("wait 1 ; (go -> Skip) startby 0"), Event::tick()));
  CHECK(start == std::vector<Event>{Event::visible("go")});
  CHECK(explore(cfg("(wait 3 ; go -> Skip) startby K"), 10).verdict.kind == Verdict::Kind::DeadlineViolation);
}

TEST_CASE("choice obligations are dormant until the choice resolves") {
  const char* src = "(wait 2 ; go -> Skip) endby 1 [] wait 3 ; b -> Skip";
  auto dormant = explore(cfg(src), 6);
  auto live = explore(cfg(src, SimOptions{{0, 1}, 10000, false}), 6);
  CHECK(dormant.verdict.kind == Verdict::Kind::Ok);
  CHECK(live.verdict.kind == Verdict::Kind::DeadlineViolation);
  CHECK(live.verdict.clock == 1);
  REQUIRE(live.witness);
  CHECK(to_string(*live.witness) == "<tock>");
  // once the branch is taken its budget runs
  CHECK(explore(cfg("(go -> wait 3) endby 1 [] b -> Skip"), 6).verdict.kind == Verdict::Kind::DeadlineViolation);
  CHECK(run(cfg("(go -> Skip) endby 1 [] b -> Skip"), Policy::prioritised({"tock"}), 5).verdict.kind ==
        Verdict::Kind::Ok);
}

TEST_CASE("step is a function and clocks never decrease") {
  Rng r(5);
  for (int i = 0; i < 60; ++i) {
    auto src = ActionTextGen(r, "n").gen(3);
    auto c = cfg(src);
    for (int k = 0; k < 25 && !c.terminated(); ++k) {
      auto es = enabled(c);
      if (es.empty()) break;
      const auto& e = es[static_cast<std::size_t>(r.below(static_cast<int>(es.size())))];
      auto x = step(c, e), y = step(c, e);
      CHECK(x.key() == y.key());
      CHECK(x.clock == y.clock);
      CHECK(x.clock >= c.clock);
      for (const auto& o : obligations(x)) CHECK(o.budget >= 0);
      c = x;
    }
  }
}

TEST_CASE("urgency: an expired obligation stops time") {
  Rng r(17);
  int expired_seen = 0;
  for (int i = 0; i < 80; ++i) {
    auto c = cfg(ActionTextGen(r, "n").gen(3));
    for (int k = 0; k < 30 && !c.terminated(); ++k) {
      auto es = enabled(c);
      bool expired = false;
      for (const auto& o : obligations(c)) expired = expired || o.budget == 0;
      if (expired) {
        ++expired_seen;
        CHECK_FALSE(has_tick(es));
      }
      if (es.empty()) break;
      c = step(c, es[static_cast<std::size_t>(r.below(static_cast<int>(es.size())))]);
    }
  }
  CHECK(expired_seen > 0);
}

TEST_CASE("periodic framework urgency at the release point") {
  auto c = peh_harness(2, 5);
  c = step(c, Event::visible("start_peh", {Value::of_id("M"), Value::of_id("H"), Value::of_nat(2), Value::of_nat(5)}));
  for (int i = 0; i < 2; ++i) {
    auto now = enabled(c);
    CHECK(now == std::vector<Event>{Event::tick()});
    c = step(c, Event::tick());
  }
  auto at2 = enabled(c);
  CHECK_FALSE(has_tick(at2));
  CHECK(run(peh_harness(1, 2), Policy::random(3), 20).verdict.kind == Verdict::Kind::Ok);
}

TEST_CASE("running example over five periods") {
  auto out = translate_program(replicator());
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto c = make_config(out.paragraphs, "System", replicator_consts(6));
    auto a = run(c, Policy::random(seed), 50), b = run(c, Policy::random(seed), 50);
    CHECK(a.verdict.kind == Verdict::Kind::Ok);
    CHECK(a.verdict.clock == 50);
    std::vector<std::int64_t> inputs;
    for (const auto& te : a.trace)
      if (te.event.channel == "input") inputs.push_back(te.clock);
    REQUIRE(inputs.size() == 5);
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      CHECK(inputs[k] >= static_cast<std::int64_t>(10 * k));
      CHECK(inputs[k] <= static_cast<std::int64_t>(10 * k + 2));
    }
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t k = 0; k < a.trace.size(); ++k) {
      CHECK(a.trace[k].event == b.trace[k].event);
      CHECK(a.trace[k].clock == b.trace[k].clock);
    }
  }
  CHECK_THROWS_AS(make_config(out.paragraphs, "System", {{"P", 10}}), SimError);
  CHECK_THROWS_AS(make_config(out.paragraphs, "Nowhere", replicator_consts()), SimError);
}
