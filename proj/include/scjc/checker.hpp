#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

#include "scjc/ast.hpp"
#include "scjc/diagnostic.hpp"

namespace scjc {

/// Allocation keywords permitted in each paragraph kind.
struct AllocPolicy {
  static const std::set<NewKind>& permitted(ParagraphKind k);
  static bool allows(ParagraphKind k, NewKind n) { return permitted(k).count(n) > 0; }
};

/// Well-formedness of an SCJ-Circus program. Codes: E-ALLOC, E-CHAN, E-REF,
/// E-DUP, E-METH, E-BIND, E-PART, E-TIME. Sorted by span.
Diagnostics check_program(const SCJProgram& p);

/// Name resolution and channel checks for a plain Circus program (as
/// produced by translate). Same codes as check_program.
Diagnostics check_circus_program(const CircusProgram& p);

using ConstBindings = std::map<std::string, std::int64_t>;

/// Lockstep timing conditions PTB + ID <= PD and PD + AD <= P for every
/// periodic handler and the aperiodic handler it releases in the same
/// mission. W-TIMING per violated inequality, E-UNBOUND for unbound time
/// constants, E-TIME for empty wait ranges.
Diagnostics check_timing_conditions(const SCJProgram& p, const ConstBindings& bindings);

/// Builtin named sets usable with `in` / `notin`.
const std::set<std::string>& builtin_sets();

}  // namespace scjc
