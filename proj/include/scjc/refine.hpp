#pragma once

// Refinement laws with mechanical proviso checks, bounded trace-containment
// refinement, and the recogniser mapping translated networks back to
// SCJ-Circus paragraphs.

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "scjc/ast.hpp"
#include "scjc/checker.hpp"
#include "scjc/sim.hpp"

namespace scjc {

class ProvisoViolation : public std::runtime_error {
 public:
  ProvisoViolation(std::string proviso, std::set<std::string> names)
      : std::runtime_error(describe(proviso, names)), proviso_(std::move(proviso)), names_(std::move(names)) {}

  const std::string& proviso() const { return proviso_; }
  const std::set<std::string>& names() const { return names_; }

 private:
  static std::string describe(const std::string& p, const std::set<std::string>& names);
  std::string proviso_;
  std::set<std::string> names_;
};

/// The law's left-hand side does not match the target.
class ShapeMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Child indices from the root of an action: operands in source order,
/// prefix continuation and unary bodies at 0, guarded branches by position.
using ActionPath = std::vector<std::size_t>;

ActionPtr action_at(const ActionPtr& root, const ActionPath& path);
ActionPtr replace_at(const ActionPtr& root, const ActionPath& path, const ActionPtr& with);

enum class Law { Law1, Law2 };

/// Parallelism introduction:
///   F(A)  ~>  (F(c1 -> c2 -> Skip) [| ns1 | {|c1, c2|} | ns2 |] (c1 -> A ; c2 -> Skip)) \ {|c1, c2|}
/// Provisos: usedV(F) and usedV(A) disjoint; c1, c2 distinct and not used
/// in F(A); ns1 covers usedV(F), ns2 covers usedV(A), ns1 and ns2 disjoint.
/// Empty name sets default to usedV(F) and usedV(A).
ActionPtr apply_law1(const ActionPtr& context, const ActionPtr& a, const std::string& c1,
                     const std::string& c2, NameSet ns1 = {}, NameSet ns2 = {});

/// Applies Law 1 to the main action of basic process `p`, which must equal
/// `context` filled with `a`. Channel freshness is checked against the whole
/// process.
ProcessPtr apply_law1(const ProcessPtr& p, const ActionPtr& context, const ActionPtr& a,
                      const std::string& c1, const std::string& c2, NameSet ns1 = {}, NameSet ns2 = {});

/// Unused behaviour introduction:
///   a -> A [| ns1 | cs | ns2 |] a -> B  ~>  a -> A [| ns1 | cs u {|b|} | ns2 |] (a -> B [] b -> C)
/// Provisos: a in cs; b not used in A or B.
ActionPtr apply_law2(const ActionPtr& target, const std::string& b, const ActionPtr& c);

/// Applies Law 2 at `path` inside the main action of basic process `p`.
ProcessPtr apply_law2(const ProcessPtr& p, const ActionPath& path, const std::string& b, const ActionPtr& c);

struct RefinementResult {
  bool holds = true;
  /// Shortest trace of the implementation that the specification lacks.
  std::optional<Trace> counterexample;
  bool partial = false;
};

/// traces(impl, depth) subset of traces(spec, depth).
RefinementResult check_bounded_refinement(const Config& spec, const Config& impl, std::size_t depth,
                                          const EnumOptions& options = {});

/// Both processes are looked up in `program`.
RefinementResult check_bounded_refinement(const CircusProgram& program, const std::string& spec,
                                          const std::string& impl, std::size_t depth,
                                          const ConstBindings& consts, const EnumOptions& options = {});

/// Action-level check. Channels used but not declared in `channels` are
/// declared with `nat` fields matching their first use; `state` variables
/// start at their defaults.
RefinementResult check_bounded_refinement(const ActionPtr& spec, const ActionPtr& impl, std::size_t depth,
                                          const std::vector<ChannelDecl>& channels = {},
                                          const std::vector<VarDecl>& state = {},
                                          const EnumOptions& options = {});

/// Maps a translated Circus program back to the SCJ-Circus program it came
/// from: each `(FW(<N>ID) [| CS |] <N>_App) \ CS` becomes the paragraph `N`;
/// generated channels, ids, framework templates and `Application` are
/// dropped; other paragraphs pass through. Throws ShapeMismatch when a
/// composed process or its application process does not have the shape the
/// translation produces.
SCJProgram recognize(const CircusProgram& program);

}  // namespace scjc
