#include <doctest.h>

#include <algorithm>

#include "support.hpp"

using namespace testing;

namespace {

std::map<std::string, ProcessPtr> processes(const CircusProgram& p) {
  std::map<std::string, ProcessPtr> out;
  for (const auto& para : p)
    if (auto* d = std::get_if<ProcessDecl>(&para)) out[d->name] = d->body;
  return out;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

NameSetT names_of(const ChanSet& cs) {
  NameSetT out;
  for (const auto& r : cs) out.insert(r.channel);
  return out;
}

const ActionPtr& methods_of(const ProcessPtr& app) {
  const auto& b = std::get<Process::Basic>(app->node);
  for (const auto& d : b.actions)
    if (d.name == "Methods") return d.body;
  throw std::runtime_error("no Methods");
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
  return s;
}

}  // namespace

TEST_CASE("running example shape") {
  auto out = translate_program(replicator());
  auto procs = processes(out.paragraphs);
  int apps = 0, composed = 0;
  for (const auto& [name, _] : procs) apps += ends_with(name, "_App");
  for (const auto& [scj, pair] : out.processes) {
    CHECK(procs.count(pair.first));
    CHECK(procs.count(pair.second));
    CHECK(pair.first == scj + "_App");
    CHECK(pair.second == scj);
    composed += std::holds_alternative<Process::Hide>(procs.at(pair.second)->node);
  }
  CHECK(apps == 5);
  CHECK(composed == 5);
  CHECK(out.processes.size() == 5);
  CHECK(procs.count("Application"));
  CHECK(std::count_if(out.paragraphs.begin(), out.paragraphs.end(), [](const CircusParagraph& p) {
          auto* d = std::get_if<ProcessDecl>(&p);
          return d && d->name == "Application";
        }) == 1);
  auto* last = std::get_if<ProcessDecl>(&out.paragraphs.back());
  REQUIRE(last);
  CHECK(last->name == "Application");
}

TEST_CASE("golden translation") {
  auto out = translate_program(replicator());
  auto golden = read_text(source_path("tests/golden/replicator.circus"));
  CHECK(trim(pretty_print(out.paragraphs)) == trim(golden));
  auto back = parse_circus_program(golden, "golden");
  REQUIRE(back.value);
  CHECK(equal(*back.value, out.paragraphs));
  CHECK(check_circus_program(*back.value).empty());
}

TEST_CASE("generated channel declarations are unique") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    auto out = translate_program(parse_ok(ProgramGen(seed).gen()));
    std::set<std::string> seen;
    for (const auto& para : out.paragraphs)
      if (auto* c = std::get_if<ChannelDecl>(&para))
        for (const auto& n : c->names) CHECK_MESSAGE(seen.insert(n).second, n);
  }
}

TEST_CASE("plain Circus passes through") {
  auto p = parse_ok("channel c\nprocess P = begin @ c -> Skip end\n");
  auto out = translate_program(p);
  REQUIRE(out.paragraphs.size() == 3);
  CHECK(out.processes.empty());
  CHECK(equal(out.paragraphs[0], std::get<CircusParagraph>(p[0])));
  CHECK(equal(out.paragraphs[1], std::get<CircusParagraph>(p[1])));
  CHECK(equal(processes(out.paragraphs).at("Application"), basic_process({}, {}, skip())));
}

TEST_CASE("safelet methods") {
  auto base = parse_ok(
      "safelet S = begin initialize = Skip getSequencer = res s @ s := QID end\n"
      "sequencer Q = begin getNextMission = res m @ m := null end\n");
  const auto& s = std::get<SafeletDecl>(base[0]);
  auto paras = translate_safelet(s);
  REQUIRE(paras.size() == 2);
  auto procs = processes(paras);
  CHECK(equal(methods_of(procs.at("S_App")),
              action_ok("mu X @ getSequencerMeth ; X [] initializeApplicationMeth ; X [] end_safelet_app -> Skip")));

  auto with_log = s;
  with_log.methods.push_back({"log", skip(), {}});
  auto logged = processes(translate_safelet(with_log));
  CHECK(equal(methods_of(logged.at("S_App")),
              action_ok("mu X @ getSequencerMeth ; X [] initializeApplicationMeth ; X [] logMeth ; X [] "
                        "end_safelet_app -> Skip")));
}

TEST_CASE("empty handler body") {
  auto p = parse_ok(
      "safelet S = begin initialize = Skip getSequencer = res s @ s := QID end\n"
      "sequencer Q = begin getNextMission = res m @ m := null end\n"
      "mission M = begin initialize = Skip handlers H cleanup = Skip end\n"
      "aperiodic handler H = begin handleAsyncEvent = Skip end\n");
  auto app = processes(translate_aperiodic_handler(std::get<AperiodicHandlerDecl>(p[3]))).at("H_App");
  const auto& b = std::get<Process::Basic>(app->node);
  REQUIRE(b.actions.size() == 2);
  CHECK(equal(b.actions[0].body,
              *parse_action("handleAsyncEventCall?x!HID -> handleAsyncEventRet!x!HID -> Skip",
                            {{"HID"}, {}})
                   .value));
}

TEST_CASE("channel sets are the channels both sides use") {
  auto out = translate_program(replicator());
  auto procs = processes(out.paragraphs);
  static const std::map<FrameworkKind, std::string> end_chan = {
      {FrameworkKind::SafeletFW, "end_safelet_app"}, {FrameworkKind::SequencerFW, "end_sequencer_app"},
      {FrameworkKind::MissionFW, "end_mission_app"}, {FrameworkKind::PEHFW, "end_handler_app"},
      {FrameworkKind::APEHFW, "end_handler_app"}};
  for (const auto& para : replicator()) {
    if (std::holds_alternative<CircusParagraph>(para)) continue;
    auto kind = framework_kind_of(para);
    auto name = paragraph_name(para);
    NameSetT oracle;
    auto app_chans = used_channels(procs.at(name + "_App"));
    for (const auto& c : framework_interface(kind))
      if (app_chans.count(c)) oracle.insert(c);
    oracle.insert(end_chan.at(kind));
    auto cs = names_of(channel_set(kind, name));
    CHECK_MESSAGE(cs == oracle, name);
    for (const char* crossing : {"start_peh", "start_mission", "done_sequencer", "start_sequencer", "release"})
      CHECK(!cs.count(crossing));
  }
  CHECK(names_of(channel_set(FrameworkKind::SafeletFW, "S")) ==
        NameSetT{"safeletInitializeCall", "safeletInitializeRet", "getSequencerCall", "getSequencerRet",
                 "end_safelet_app"});
  CHECK(names_of(channel_set(FrameworkKind::PEHFW, "H")) ==
        NameSetT{"handleAsyncEventCall", "handleAsyncEventRet", "end_handler_app"});
  CHECK(names_of(channel_set(FrameworkKind::SafeletFW, "S", {"log"})).count("logCall"));
}

TEST_CASE("hidden channels never appear in component traces") {
  auto out = translate_program(replicator());
  for (const auto& para : replicator()) {
    if (std::holds_alternative<CircusParagraph>(para)) continue;
    auto name = paragraph_name(para);
    auto hidden = names_of(channel_set(framework_kind_of(para), name));
    auto ts = enumerate_traces(make_config(out.paragraphs, name, replicator_consts()), 3, {TickMode::Disabled, 20000});
    CHECK(ts.traces.size() > 1);
    std::set<std::string> leaked;
    for (const auto& t : ts.traces)
      for (const auto& e : t)
        if (hidden.count(e.channel)) leaked.insert(e.channel);
    CHECK_MESSAGE(leaked.empty(), name);
  }
}

TEST_CASE("translation is compositional") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto p = parse_ok(ProgramGen(seed).gen());
    auto q = p;
    // handlers are independent of each other; reverse their order
    auto first = std::find_if(q.begin(), q.end(), [](const SCJParagraph& x) {
      return paragraph_kind(x) == ParagraphKind::Handler;
    });
    std::reverse(first, q.end());
    auto a = processes(translate_program(p).paragraphs), b = processes(translate_program(q).paragraphs);
    a.erase("Application");
    b.erase("Application");
    REQUIRE(a.size() == b.size());
    for (const auto& [n, proc] : a) CHECK_MESSAGE(equal(proc, b.at(n)), n);

    CircusProgram concat;
    for (const auto& para : p) {
      std::vector<CircusParagraph> part;
      if (auto* s = std::get_if<SafeletDecl>(&para)) part = translate_safelet(*s);
      else if (auto* s = std::get_if<SequencerDecl>(&para)) part = translate_sequencer(*s);
      else if (auto* m = std::get_if<MissionDecl>(&para)) part = translate_mission(*m, p);
      else if (auto* h = std::get_if<PeriodicHandlerDecl>(&para)) part = translate_periodic_handler(*h);
      else if (auto* h = std::get_if<AperiodicHandlerDecl>(&para)) part = translate_aperiodic_handler(*h);
      for (auto& x : part) concat.push_back(x);
    }
    auto whole = processes(translate_program(p).paragraphs);
    for (const auto& [n, proc] : processes(concat)) CHECK(equal(proc, whole.at(n)));
    CHECK(equal(whole.at("Application"), application_process(p)));
  }
}
