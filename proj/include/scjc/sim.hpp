#pragma once

// Discrete-time (tock-style) operational semantics for Circus Time process
// networks: enabled events, stepping, random and prioritised runs, bounded
// trace enumeration and exhaustive search for deadline violations.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "scjc/ast.hpp"
#include "scjc/checker.hpp"

namespace scjc {

/// Malformed or unsupported input met while building or running a network
/// (unbound constant, unknown process, free action variable, ...).
class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Event {
  enum class Kind { Visible, Internal, Tick };

  Kind kind = Kind::Visible;
  std::string channel;
  std::vector<Value> payload;
  /// Location of the transition inside the term. Distinguishes transitions
  /// with the same label; ignored by comparisons.
  std::string via;

  static Event tick() { return {Kind::Tick, {}, {}, {}}; }
  static Event visible(std::string channel, std::vector<Value> payload = {}) {
    return {Kind::Visible, std::move(channel), std::move(payload), {}};
  }

  bool operator==(const Event& o) const {
    return kind == o.kind && channel == o.channel && payload == o.payload;
  }
  std::strong_ordering operator<=>(const Event& o) const;
};

/// `tock`, `c.v1.v2`, or `tau(c.v)` / `tau` for internal events.
std::string to_string(const Event& e);

using Trace = std::vector<Event>;
std::string to_string(const Trace& t);

struct SimOptions {
  /// Values offered for `nat` inputs left open by the whole network.
  std::vector<std::int64_t> nat_domain = {0, 1};
  /// Guard against unguarded recursion while settling a term.
  int max_unfoldings = 10000;
  /// Deadline and start-by budgets inside a branch of an unresolved external
  /// choice do not run until a visible event of that branch resolves the
  /// choice. When false, budgets run from the moment the choice is offered.
  bool dormant_choice_obligations = true;
};

class Network;
struct SimNode;

/// Immutable simulation state. The store lives inside the term (one per
/// basic process); obligations are derived from it.
struct Config {
  std::shared_ptr<const Network> network;
  std::shared_ptr<const SimNode> term;
  std::int64_t clock = 0;

  /// Canonical text of the term (store included, clock excluded).
  std::string key() const;
  bool terminated() const;
};

struct Obligation {
  std::string component;
  std::string op;  // e.g. "endby PD"
  std::int64_t budget;
};

/// Pending deadline and start-by budgets in active positions.
std::vector<Obligation> obligations(const Config& c);

/// Builds the initial configuration of process `main` of `program`. Every
/// declared constant must be bound.
Config make_config(const CircusProgram& program, const std::string& main,
                   const ConstBindings& consts, const SimOptions& options = {});

/// Builds a configuration for a single action over the given channels, with
/// state variables initialised to their defaults.
Config make_action_config(const ActionPtr& action, const std::vector<ChannelDecl>& channels,
                          const std::vector<VarDecl>& state = {}, const ConstBindings& consts = {},
                          const std::vector<std::string>& ids = {}, const SimOptions& options = {});

/// Events permitted in `c`, open inputs expanded over their sort domains.
/// Tick is enabled only when no internal event is (maximal progress) and no
/// expired deadline or start-by obligation blocks time.
std::vector<Event> enabled(const Config& c);

class IllegalStep : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Successor of `c` after `e`. When `e.via` is empty the first matching
/// transition is taken. Throws IllegalStep if `e` is not enabled.
Config step(const Config& c, const Event& e);

/// Every enabled event with its successor.
std::vector<std::pair<Event, Config>> successors(const Config& c);

struct Verdict {
  enum class Kind { Ok, DeadlineViolation, Deadlock, DepthExhausted };
  Kind kind = Kind::Ok;
  std::string component;
  std::string op;
  std::int64_t clock = 0;
};

std::string to_string(const Verdict& v);

struct Policy {
  enum class Kind { Random, Priority };
  Kind kind = Kind::Random;
  std::uint64_t seed = 0;
  /// Channel names in order of preference; `tock` and `tau` name ticks and
  /// internal events. Unlisted events are never chosen.
  std::vector<std::string> priority;

  static Policy random(std::uint64_t seed) { return {Kind::Random, seed, {}}; }
  static Policy prioritised(std::vector<std::string> order) { return {Kind::Priority, 0, std::move(order)}; }
};

struct TimedEvent {
  std::int64_t clock;
  Event event;
};

struct RunResult {
  std::vector<TimedEvent> trace;  // visible events only
  Verdict verdict;
  Config final;
};

/// Random policy: internal events first, then visible, then tick, uniformly
/// within a class. Stops on termination, violation, deadlock, when the clock
/// reaches `max_ticks`, or after `max_steps` events (depth_exhausted).
RunResult run(const Config& c0, const Policy& policy, std::int64_t max_ticks,
              std::size_t max_steps = 200000);

enum class TickMode {
  /// Ticks are explored and recorded as `tock`.
  Visible,
  /// Ticks are explored but left out of traces.
  Elided,
  /// Ticks are never taken.
  Disabled
};

struct EnumOptions {
  TickMode ticks = TickMode::Visible;
  std::size_t state_cap = 1000000;
};

struct TraceSet {
  std::set<Trace> traces;
  /// The state cap was reached; `traces` is a subset of the true set.
  bool partial = false;
};

/// All visible traces of length <= depth, internal events elided.
TraceSet enumerate_traces(const Config& c0, std::size_t depth, const EnumOptions& options = {});

struct ExploreResult {
  std::optional<Trace> witness;  // path to the first violation found
  Verdict verdict;               // the violation, or ok / depth_exhausted
  std::size_t states = 0;
};

/// Breadth-first search of every configuration reachable before the clock
/// exceeds `max_ticks`, looking for a deadline violation.
ExploreResult explore(const Config& c0, std::int64_t max_ticks, std::size_t state_cap = 1000000);

}  // namespace scjc
