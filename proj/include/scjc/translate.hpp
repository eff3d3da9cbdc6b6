#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "scjc/ast.hpp"
#include "scjc/frameworks.hpp"

namespace scjc {

/// Raised only when translate is given input the checker would reject.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct TranslationOutput {
  CircusProgram paragraphs;
  /// SCJ paragraph name -> (application process, composed process).
  std::map<std::string, std::pair<std::string, std::string>> processes;
};

/// Prelude (framework channels, generated channels, ids, framework
/// templates), then each paragraph in source order, then `Application`.
TranslationOutput translate_program(const SCJProgram& p);

/// `<N>_App` followed by `<N> = (FW(<N>ID) [| CS |] <N>_App) \ CS`.
std::vector<CircusParagraph> translate_safelet(const SafeletDecl& s);
std::vector<CircusParagraph> translate_sequencer(const SequencerDecl& s);
/// Handler declarations are looked up in `program` for their start, period
/// and constructor parameters.
std::vector<CircusParagraph> translate_mission(const MissionDecl& m, const SCJProgram& program);
std::vector<CircusParagraph> translate_periodic_handler(const PeriodicHandlerDecl& h);
std::vector<CircusParagraph> translate_aperiodic_handler(const AperiodicHandlerDecl& h);

/// Channels shared by a component's framework and application processes,
/// hidden in the composed process. `aux` lists auxiliary method names.
ChanSet channel_set(FrameworkKind kind, const std::string& name,
                    const std::vector<std::string>& aux = {});

FrameworkKind framework_kind_of(const SCJParagraph& p);

/// Channels of the constructor protocol of a handler (`<H>InitCall`,
/// `<H>InitRet`).
std::string init_call_channel(const std::string& handler);
std::string init_ret_channel(const std::string& handler);

/// Per-element composition of the components, as emitted for `Application`.
ProcessPtr application_process(const SCJProgram& p);

/// The same components composed framework-first: every framework process
/// in one network, every application process in another, the two
/// synchronised on all component-internal and cross-cutting channels.
ProcessPtr framework_first_application(const SCJProgram& p);

/// Converts a time expression to the equivalent data expression.
ExprPtr expr_of_time(const TimeExpr& t);

}  // namespace scjc
