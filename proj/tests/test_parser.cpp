#include <doctest.h>

#include "support.hpp"

using namespace testing;

namespace {

std::vector<ActionPtr> kids(const ActionPtr& a) {
  return std::visit(
      [](const auto& x) -> std::vector<ActionPtr> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (requires { x.lhs; x.rhs; }) return {x.lhs, x.rhs};
        else if constexpr (requires { x.cont; }) return {x.cont};
        else if constexpr (requires { x.body; }) return {x.body};
        else if constexpr (std::is_same_v<T, Action::Guarded>) {
          std::vector<ActionPtr> out;
          for (const auto& b : x.branches) out.push_back(b.body);
          return out;
        } else
          return {};
      },
      a->node);
}

int span_violations(const ActionPtr& a) {
  int bad = 0;
  for (const auto& k : kids(a)) {
    if (a->span.known() && k->span.known() && !a->span.contains(k->span)) ++bad;
    bad += span_violations(k);
  }
  return bad;
}

bool ok_xor_errors(const ParseResult<SCJProgram>& r) {
  return r.value ? !has_errors(r.diagnostics) : has_errors(r.diagnostics);
}

}  // namespace

TEST_CASE("empty file is the empty program") {
  auto r = parse_program("", "empty.scjc");
  REQUIRE(r.value);
  CHECK(r.value->empty());
  CHECK(r.diagnostics.empty());
  CHECK(parse_program("-- only a comment\n").value->empty());
}

TEST_CASE("running example paragraphs") {
  auto p = replicator();
  std::vector<ParagraphKind> kinds;
  for (const auto& para : p)
    if (paragraph_kind(para) != ParagraphKind::Circus) kinds.push_back(paragraph_kind(para));
  CHECK(kinds == std::vector<ParagraphKind>{ParagraphKind::Safelet, ParagraphKind::Sequencer, ParagraphKind::Mission,
                                            ParagraphKind::Handler, ParagraphKind::Handler});
  const PeriodicHandlerDecl* ph = nullptr;
  int aperiodic = 0;
  for (const auto& para : p) {
    if (auto* h = std::get_if<PeriodicHandlerDecl>(&para)) ph = h;
    if (std::holds_alternative<AperiodicHandlerDecl>(para)) ++aperiodic;
  }
  REQUIRE(ph);
  CHECK(aperiodic == 1);
  CHECK(equal(ph->start, TimeExpr::literal(0)));
  CHECK(equal(ph->period, TimeExpr::constant("P")));
  REQUIRE(ph->initial);
  CHECK(ph->initial->params == std::vector<VarDecl>{{"ah", Sort::Id}});
}

TEST_CASE("missing mandatory clauses are located errors") {
  auto r = parse_program("periodic handler H = begin end");
  CHECK_FALSE(r.value);
  REQUIRE_FALSE(r.diagnostics.empty());
  bool hae = false;
  for (const auto& d : r.diagnostics) {
    CHECK(d.span.known());
    hae = hae || d.message.find("handleAsyncEvent") != std::string::npos;
  }
  CHECK(hae);
  CHECK(r.diagnostics.front().code == "E-METH");
}

TEST_CASE("syntax errors") {
  for (const char* src : {"safelet S = begin initialize = Skip", "channel c: nat\nprocess P = begin @ c!1 -> end",
                          "process P = begin @ wait + end", "process P = begin @ a -> Skip [] end", "mission"}) {
    auto r = parse_program(src);
    CHECK_MESSAGE(!r.value, src);
    CHECK_MESSAGE(has_errors(r.diagnostics), src);
    for (const auto& d : r.diagnostics) CHECK(d.span.start_line >= 1);
  }
}

TEST_CASE("parse_action") {
  CHECK(equal(action_ok("Skip"), skip()));
  auto mu_x = action_ok("mu X @ c -> X");
  REQUIRE(std::holds_alternative<Action::Mu>(mu_x->node));
  CHECK(std::get<Action::Mu>(mu_x->node).var == "X");
  CHECK(equal(mu_x, mu("X", prefix("c", {}, rec_var("X")))));

  ParseScope scope{{"ID", "PTB"}, {"buffer"}};
  auto a = parse_action("(input?x -> Skip) startby ID ; setBuffer!(buffer ^ <x>) -> release -> wait 0..PTB", scope);
  REQUIRE(a.value);
  auto expected = seq(start_by(prefix("input", {CommField::in("x")}, skip()), TimeExpr::constant("ID")),
                      prefix("setBuffer",
                             {CommField::out(binary(BinOp::Concat, var_name("buffer"), seq_lit({var_name("x")})))},
                             prefix("release", {}, wait_range(TimeExpr::literal(0), TimeExpr::constant("PTB")))));
  CHECK(equal(*a.value, expected));
}

TEST_CASE("operator precedence") {
  // prefix binds tighter than sequence, sequence tighter than choice
  CHECK(equal(action_ok("a -> Skip ; b -> Skip [] c -> Skip"),
              ext_choice(seq(prefix("a", {}, skip()), prefix("b", {}, skip())), prefix("c", {}, skip()))));
  // choice binds tighter than parallel
  CHECK(equal(action_ok("a -> Skip [] b -> Skip ||| c -> Skip"),
              interleave(ext_choice(prefix("a", {}, skip()), prefix("b", {}, skip())), prefix("c", {}, skip()))));
  // deadline binds tighter than sequence
  CHECK(equal(action_ok("a -> Skip endby 2 ; b -> Skip"),
              seq(deadline(prefix("a", {}, skip()), TimeExpr::literal(2)), prefix("b", {}, skip()))));
}

TEST_CASE("determinism and span coverage") {
  auto src = read_text(source_path("examples/replicator.scjc"));
  auto a = parse_program(src), b = parse_program(src);
  REQUIRE(a.value);
  CHECK(equal(*a.value, *b.value));
  CHECK(pretty_print(*a.value) == pretty_print(*b.value));

  int bad = 0;
  for (const auto& para : *a.value) {
    std::visit(
        [&](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (requires { d.handle_async_event; }) bad += span_violations(d.handle_async_event);
          if constexpr (requires { d.get_sequencer; }) bad += span_violations(d.get_sequencer);
          if constexpr (requires { d.get_next_mission; }) bad += span_violations(d.get_next_mission);
          if constexpr (std::is_same_v<T, CircusParagraph>)
            if (auto* pd = std::get_if<ProcessDecl>(&d))
              if (auto* bp = std::get_if<Process::Basic>(&pd->body->node)) bad += span_violations(bp->main);
        },
        para);
  }
  CHECK(bad == 0);

  Rng r(3);
  for (int i = 0; i < 100; ++i) {
    auto act = parse_action(ActionTextGen(r, "n").gen(4), {{"K"}, {"n"}});
    REQUIRE(act.value);
    CHECK(span_violations(*act.value) == 0);
  }
}

TEST_CASE("fuzz: arbitrary input never crashes") {
  Rng r(99);
  auto example = read_text(source_path("examples/replicator.scjc"));
  static const std::vector<std::string> tokens = {
      "safelet", "begin", "end", "->", "[]", "(", ")", "[|", "|]", "{|", "|}", "mu", "X", "@", ";", "Skip",
      "wait", "0..", "endby", "startby", "handler", "periodic", "=", "c", "!", "?", "<", ">", "^", "if", "fi",
      "then", "state", "[", "]", ":", "nat", "newI", "\\", "/\\", "|||", "--", "\n", "0", "99999999999999999999"};
  for (int i = 0; i < 400; ++i) {
    std::string src;
    switch (i % 3) {
      case 0:
        for (int k = r.below(200); k > 0; --k) src += static_cast<char>(r.below(256));
        break;
      case 1:
        for (int k = r.below(60); k > 0; --k) src += r.one_of(tokens) + " ";
        break;
      default: {
        src = example;
        for (int k = 1 + r.below(5); k > 0; --k) {
          auto pos = static_cast<std::size_t>(r.below(static_cast<int>(src.size())));
          src.erase(pos, static_cast<std::size_t>(r.below(20)));
        }
      }
    }
    auto res = parse_program(src, "fuzz");
    CHECK(ok_xor_errors(res));
    auto act = parse_action(src);
    CHECK((act.value.has_value() || has_errors(act.diagnostics)));
  }
  std::string deep(5000, '(');
  CHECK_FALSE(parse_action(deep + "Skip").value);
}
