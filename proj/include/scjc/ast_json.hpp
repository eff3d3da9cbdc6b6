#pragma once

// JSON rendering of syntax trees, diagnostics and simulation results for the
// command-line tool. Every node is an object with a "node" tag.

#include <json.hpp>

#include "scjc/ast.hpp"
#include "scjc/diagnostic.hpp"
#include "scjc/sim.hpp"

namespace scjc {

nlohmann::json to_json(const ExprPtr& e);
nlohmann::json to_json(const TimeExpr& t);
nlohmann::json to_json(const ChanSet& cs);
nlohmann::json to_json(const ActionPtr& a);
nlohmann::json to_json(const ProcessPtr& p);
nlohmann::json to_json(const CircusParagraph& p);
nlohmann::json to_json(const SCJParagraph& p);
nlohmann::json to_json(const SCJProgram& p);
nlohmann::json to_json(const CircusProgram& p);

nlohmann::json to_json(const Diagnostic& d);
nlohmann::json to_json(const Event& e);
nlohmann::json to_json(const Verdict& v);

}  // namespace scjc
