#include "scjc/parser.hpp"

#include <charconv>
#include <functional>

#include "scjc/lexer.hpp"

namespace scjc {

namespace {

const std::set<std::string> kKeywords = {
    "Skip",   "Stop",      "HOLE",    "mu",      "var",     "wait",     "endby", "startby",
    "if",     "then",      "fi",      "begin",   "end",     "state",    "process", "channel",
    "const",  "ids",       "safelet", "sequencer", "mission", "periodic", "aperiodic",
    "handler", "true",     "false",   "null",    "in",      "notin",    "newI",  "newM",
    "newPR",  "newPM",     "res",     "this",    "and",     "or",       "not"};

constexpr int kMaxDepth = 200;

struct ParseError {
  Diagnostic diag;
};

class Parser {
 public:
  Parser(std::string_view src, const std::string& file, const ParseScope& scope)
      : toks_(tokenize(src, file)),
        globals_(scope.constants),
        vars_(scope.variables.begin(), scope.variables.end()) {
    if (toks_.size() >= 2 && toks_[toks_.size() - 2].kind == TokKind::Error) {
      const Token& bad = toks_[toks_.size() - 2];
      error_ = Diagnostic{Severity::Error, "E-SYNTAX", "invalid character '" + bad.text + "'",
                          bad.span};
    }
  }

  template <class T>
  ParseResult<T> run(const std::function<T(Parser&)>& body) {
    ParseResult<T> r;
    if (error_) {
      r.diagnostics.push_back(*error_);
      return r;
    }
    try {
      T v = body(*this);
      if (peek().kind != TokKind::Eof) fail(peek(), "unexpected '" + peek().text + "'");
      r.value = std::move(v);
    } catch (const ParseError& e) {
      r.diagnostics.push_back(e.diag);
    }
    return r;
  }

  // Records generated and declared constant names ahead of parsing, so uses
  // may precede declarations.
  void prescan() {
    for (std::size_t i = 0; i + 1 < toks_.size(); ++i) {
      const Token& t = toks_[i];
      if (t.is_ident("const") || t.is_ident("ids")) {
        std::size_t j = i + 1;
        while (j < toks_.size() && toks_[j].kind == TokKind::Ident) {
          globals_.insert(toks_[j].text);
          if (j + 1 < toks_.size() && toks_[j + 1].is(",")) {
            j += 2;
          } else {
            break;
          }
        }
      } else if (t.is_ident("safelet") || t.is_ident("sequencer") || t.is_ident("mission") ||
                 t.is_ident("handler")) {
        if (toks_[i + 1].kind == TokKind::Ident && !kKeywords.count(toks_[i + 1].text))
          globals_.insert(component_id(toks_[i + 1].text));
      }
    }
  }

  // ---- paragraphs ---------------------------------------------------------

  SCJProgram scj_program() {
    SCJProgram out;
    while (peek().kind != TokKind::Eof) out.push_back(scj_paragraph());
    return out;
  }

  CircusProgram circus_program() {
    CircusProgram out;
    while (peek().kind != TokKind::Eof) out.push_back(circus_paragraph());
    return out;
  }

  SCJParagraph scj_paragraph() {
    const Token& t = peek();
    if (t.is_ident("safelet")) return safelet();
    if (t.is_ident("sequencer")) return sequencer();
    if (t.is_ident("mission")) return mission();
    if (t.is_ident("periodic")) return periodic_handler();
    if (t.is_ident("aperiodic")) return aperiodic_handler();
    return circus_paragraph();
  }

  CircusParagraph circus_paragraph() {
    Token start = peek();
    if (accept_kw("channel")) {
      ChannelDecl d;
      d.names = ident_list("channel name");
      if (accept(":")) {
        d.sorts.push_back(sort());
        while (accept(".")) d.sorts.push_back(sort());
      }
      d.span = span_from(start.span);
      return d;
    }
    if (accept_kw("const")) {
      ConstDecl d;
      d.names = ident_list("constant name");
      d.span = span_from(start.span);
      return d;
    }
    if (accept_kw("ids")) {
      IdsDecl d;
      d.names = ident_list("identifier name");
      d.span = span_from(start.span);
      return d;
    }
    if (accept_kw("process")) {
      ProcessDecl d;
      d.name = expect_ident("process name").text;
      expect("=");
      d.body = process();
      d.span = span_from(start.span);
      return d;
    }
    fail(start, "expected a paragraph, found '" + start.text + "'");
  }

  SafeletDecl safelet() {
    Token start = next();
    SafeletDecl d;
    d.name = expect_ident("safelet name").text;
    expect("=");
    expect_kw("begin");
    auto mark = vars_.size();
    bool body_seen = false;
    while (!peek().is_ident("end")) {
      if (peek().is_ident("state")) {
        state_clause(d.state, body_seen);
        continue;
      }
      body_seen = true;
      const Token& t = peek();
      if (t.is_ident("initialize") && peek(1).is("=")) {
        dup_check(d.initialize != nullptr, t);
        advance(2);
        d.initialize = action();
      } else if (t.is_ident("getSequencer") && peek(1).is("=")) {
        dup_check(d.get_sequencer != nullptr, t);
        advance(2);
        d.sequencer_result = result_binder();
        auto m = vars_.size();
        vars_.push_back(d.sequencer_result);
        d.get_sequencer = action();
        vars_.resize(m);
      } else {
        d.methods.push_back(method());
      }
    }
    Token end = next();
    vars_.resize(mark);
    if (!d.initialize) missing(end, "safelet", d.name, "initialize");
    if (!d.get_sequencer) missing(end, "safelet", d.name, "getSequencer");
    d.span = span_from(start.span);
    return d;
  }

  SequencerDecl sequencer() {
    Token start = next();
    SequencerDecl d;
    d.name = expect_ident("sequencer name").text;
    expect("=");
    expect_kw("begin");
    auto mark = vars_.size();
    bool body_seen = false;
    while (!peek().is_ident("end")) {
      if (peek().is_ident("state")) {
        state_clause(d.state, body_seen);
        continue;
      }
      body_seen = true;
      const Token& t = peek();
      if (t.is_ident("initial") && peek(1).is("=")) {
        dup_check(d.initial.has_value(), t);
        advance(2);
        d.initial = Initial{{}, action()};
      } else if (t.is_ident("getNextMission") && peek(1).is("=")) {
        dup_check(d.get_next_mission != nullptr, t);
        advance(2);
        d.mission_result = result_binder();
        auto m = vars_.size();
        vars_.push_back(d.mission_result);
        d.get_next_mission = action();
        vars_.resize(m);
      } else {
        d.methods.push_back(method());
      }
    }
    Token end = next();
    vars_.resize(mark);
    if (!d.get_next_mission) missing(end, "sequencer", d.name, "getNextMission");
    d.span = span_from(start.span);
    return d;
  }

  MissionDecl mission() {
    Token start = next();
    MissionDecl d;
    d.name = expect_ident("mission name").text;
    expect("=");
    expect_kw("begin");
    auto mark = vars_.size();
    bool body_seen = false, handlers_seen = false;
    while (!peek().is_ident("end")) {
      if (peek().is_ident("state")) {
        state_clause(d.state, body_seen);
        continue;
      }
      body_seen = true;
      const Token& t = peek();
      if (t.is_ident("initial") && peek(1).is("=")) {
        dup_check(d.initial.has_value(), t);
        advance(2);
        d.initial = Initial{{}, action()};
      } else if (t.is_ident("initialize") && peek(1).is("=")) {
        dup_check(d.initialize != nullptr, t);
        advance(2);
        d.initialize = action();
      } else if (t.is_ident("cleanup") && peek(1).is("=")) {
        dup_check(d.cleanup != nullptr, t);
        advance(2);
        d.cleanup = action();
      } else if (t.is_ident("handlers") && peek(1).kind == TokKind::Ident) {
        dup_check(handlers_seen, t);
        handlers_seen = true;
        advance(1);
        do {
          Token h = expect_ident("handler name");
          HandlerRef ref;
          ref.name = h.text;
          if (peek().is("(")) ref.args = args();
          ref.span = span_from(h.span);
          d.handlers.push_back(std::move(ref));
        } while (accept(","));
      } else {
        d.methods.push_back(method());
      }
    }
    Token end = next();
    vars_.resize(mark);
    if (!d.initialize) missing(end, "mission", d.name, "initialize");
    if (!d.cleanup) missing(end, "mission", d.name, "cleanup");
    d.span = span_from(start.span);
    return d;
  }

  PeriodicHandlerDecl periodic_handler() {
    Token start = next();
    expect_kw("handler");
    PeriodicHandlerDecl d;
    d.name = expect_ident("handler name").text;
    expect("=");
    expect_kw("begin");
    auto mark = vars_.size();
    bool body_seen = false, start_seen = false, period_seen = false;
    while (!peek().is_ident("end")) {
      const Token& t = peek();
      if (t.is_ident("start") && !peek(1).is("=")) {
        dup_check(start_seen, t);
        start_seen = true;
        advance(1);
        d.start = time_atom();
      } else if (t.is_ident("period") && !peek(1).is("=")) {
        dup_check(period_seen, t);
        period_seen = true;
        advance(1);
        d.period = time_atom();
      } else if (t.is_ident("state")) {
        state_clause(d.state, body_seen);
      } else {
        body_seen = true;
        handler_clause(d.initial, d.handle_async_event, d.methods);
      }
    }
    Token end = next();
    vars_.resize(mark);
    if (!d.handle_async_event) missing(end, "periodic handler", d.name, "handleAsyncEvent");
    if (!start_seen) missing(end, "periodic handler", d.name, "start");
    if (!period_seen) missing(end, "periodic handler", d.name, "period");
    d.span = span_from(start.span);
    return d;
  }

  AperiodicHandlerDecl aperiodic_handler() {
    Token start = next();
    expect_kw("handler");
    AperiodicHandlerDecl d;
    d.name = expect_ident("handler name").text;
    expect("=");
    expect_kw("begin");
    auto mark = vars_.size();
    bool body_seen = false;
    while (!peek().is_ident("end")) {
      if (peek().is_ident("state")) {
        state_clause(d.state, body_seen);
      } else {
        body_seen = true;
        handler_clause(d.initial, d.handle_async_event, d.methods);
      }
    }
    Token end = next();
    vars_.resize(mark);
    if (!d.handle_async_event) missing(end, "aperiodic handler", d.name, "handleAsyncEvent");
    d.span = span_from(start.span);
    return d;
  }

  void handler_clause(std::optional<Initial>& initial, ActionPtr& hae,
                      std::vector<MethodDef>& methods) {
    const Token& t = peek();
    if (t.is_ident("initial") && peek(1).is("=")) {
      dup_check(initial.has_value(), t);
      advance(2);
      Initial init;
      auto m = vars_.size();
      if (peek().kind == TokKind::Ident && peek(1).is(":")) {
        init.params = decls();
        expect("@");
        for (const auto& p : init.params) vars_.push_back(p.name);
      }
      init.body = action();
      vars_.resize(m);
      initial = std::move(init);
    } else if (t.is_ident("handleAsyncEvent") && peek(1).is("=")) {
      dup_check(hae != nullptr, t);
      advance(2);
      hae = action();
    } else {
      methods.push_back(method());
    }
  }

  MethodDef method() {
    Token name = expect_ident("method name");
    expect("=");
    MethodDef m;
    m.name = name.text;
    m.body = action();
    m.span = span_from(name.span);
    return m;
  }

  void state_clause(std::vector<VarDecl>& state, bool body_seen) {
    Token t = next();
    if (body_seen) fail(t, "state must precede the method clauses");
    if (!state.empty()) fail(t, "duplicate state clause");
    state = state_decls();
    for (const auto& v : state) vars_.push_back(v.name);
  }

  std::vector<VarDecl> state_decls() {
    if (accept("[]")) return {};
    expect("[");
    auto ds = decls();
    expect("]");
    return ds;
  }

  std::string result_binder() {
    expect_kw("res");
    std::string r = expect_ident("result name").text;
    expect("@");
    return r;
  }

  // ---- processes ----------------------------------------------------------

  ProcessPtr process() {
    DepthGuard g(*this);
    Token start = peek();
    if (start.kind == TokKind::Ident && !kKeywords.count(start.text) && peek(1).is(":")) {
      auto params = decls();
      expect("@");
      auto mark = locals_.size();
      for (const auto& p : params) locals_.push_back(p.name);
      auto body = process();
      locals_.resize(mark);
      return make_process(Process::Param{std::move(params), body}, span_from(start.span));
    }
    return process_par();
  }

  ProcessPtr process_par() {
    Token start = peek();
    auto lhs = process_hide();
    while (true) {
      if (accept("|||")) {
        auto rhs = process_hide();
        lhs = make_process(Process::Interleave{lhs, rhs}, span_from(start.span));
      } else if (accept("[|")) {
        auto cs = chanset();
        expect("|]");
        auto rhs = process_hide();
        lhs = make_process(Process::Par{lhs, std::move(cs), rhs}, span_from(start.span));
      } else {
        return lhs;
      }
    }
  }

  ProcessPtr process_hide() {
    Token start = peek();
    auto body = process_atom();
    while (accept("\\")) {
      auto cs = chanset();
      body = make_process(Process::Hide{body, std::move(cs)}, span_from(start.span));
    }
    return body;
  }

  ProcessPtr process_atom() {
    DepthGuard g(*this);
    Token start = peek();
    if (accept("(")) {
      auto p = process();
      expect(")");
      return p;
    }
    if (accept_kw("begin")) {
      auto mark = vars_.size();
      std::vector<VarDecl> state;
      if (accept_kw("state")) {
        state = state_decls();
        for (const auto& v : state) vars_.push_back(v.name);
      }
      std::vector<ActionDef> defs;
      while (!peek().is("@")) {
        Token n = expect_ident("action name");
        expect("=");
        defs.push_back(ActionDef{n.text, action()});
      }
      expect("@");
      auto main = action();
      expect_kw("end");
      vars_.resize(mark);
      return make_process(Process::Basic{std::move(state), std::move(defs), main},
                          span_from(start.span));
    }
    Token n = expect_ident("process");
    if (peek().is("(")) {
      auto a = args();
      return make_process(Process::Inst{n.text, std::move(a)}, span_from(start.span));
    }
    return make_process(Process::Ref{n.text}, span_from(start.span));
  }

  // ---- actions ------------------------------------------------------------

  ActionPtr action() { return action_par(); }

  ActionPtr action_par() {
    DepthGuard g(*this);
    Token start = peek();
    auto lhs = action_choice();
    while (true) {
      if (accept("|||")) {
        auto rhs = action_choice();
        lhs = make_action(Action::Interleave{lhs, rhs}, span_from(start.span));
      } else if (accept("[|")) {
        auto ns1 = nameset();
        expect("|");
        auto cs = chanset();
        expect("|");
        auto ns2 = nameset();
        expect("|]");
        auto rhs = action_choice();
        lhs = make_action(Action::Parallel{std::move(ns1), std::move(cs), std::move(ns2), lhs, rhs},
                          span_from(start.span));
      } else {
        return lhs;
      }
    }
  }

  ActionPtr action_choice() {
    Token start = peek();
    auto lhs = action_interrupt();
    while (true) {
      if (accept("[]")) {
        auto rhs = action_interrupt();
        lhs = make_action(Action::ExtChoice{lhs, rhs}, span_from(start.span));
      } else if (accept("|~|")) {
        auto rhs = action_interrupt();
        lhs = make_action(Action::IntChoice{lhs, rhs}, span_from(start.span));
      } else {
        return lhs;
      }
    }
  }

  ActionPtr action_interrupt() {
    Token start = peek();
    auto lhs = action_seq();
    while (accept("/\\")) {
      auto rhs = action_seq();
      lhs = make_action(Action::Interrupt{lhs, rhs}, span_from(start.span));
    }
    return lhs;
  }

  ActionPtr action_seq() {
    Token start = peek();
    auto lhs = action_timed();
    while (accept(";")) {
      auto rhs = action_timed();
      lhs = make_action(Action::Seq{lhs, rhs}, span_from(start.span));
    }
    return lhs;
  }

  ActionPtr action_timed() {
    Token start = peek();
    auto body = action_hide();
    while (true) {
      if (accept_kw("endby")) {
        auto d = time_atom();
        body = make_action(Action::Deadline{body, std::move(d)}, span_from(start.span));
      } else if (accept_kw("startby")) {
        auto d = time_atom();
        body = make_action(Action::StartBy{body, std::move(d)}, span_from(start.span));
      } else {
        return body;
      }
    }
  }

  ActionPtr action_hide() {
    Token start = peek();
    auto body = action_prefix();
    while (accept("\\")) {
      auto cs = chanset();
      body = make_action(Action::Hide{body, std::move(cs)}, span_from(start.span));
    }
    return body;
  }

  ActionPtr action_prefix() {
    DepthGuard g(*this);
    const Token& t = peek();
    if (t.kind == TokKind::Ident && !kKeywords.count(t.text) &&
        (peek(1).is("!") || peek(1).is("?") || peek(1).is(".") || peek(1).is("->"))) {
      Token start = next();
      auto mark = vars_.size();
      std::vector<CommField> fields;
      while (!peek().is("->")) {
        if (accept("?")) {
          std::string v = expect_ident("input variable").text;
          fields.push_back(CommField::in(v));
          vars_.push_back(v);
        } else if (accept("!")) {
          fields.push_back(CommField::out(expr_atom()));
        } else if (accept(".")) {
          fields.push_back(CommField::dot(expr_atom()));
        } else {
          fail(peek(), "expected '->' or a communication field, found '" + peek().text + "'");
        }
      }
      expect("->");
      auto cont = action_prefix();
      vars_.resize(mark);
      return make_action(Action::Prefix{start.text, std::move(fields), cont}, span_from(start.span));
    }
    return action_atom();
  }

  ActionPtr action_atom() {
    DepthGuard g(*this);
    Token start = peek();
    if (accept_kw("Skip")) return make_action(Action::Skip{}, start.span);
    if (accept_kw("Stop")) return make_action(Action::Stop{}, start.span);
    if (accept_kw("HOLE")) return make_action(Action::Hole{}, start.span);
    if (accept("(")) {
      auto a = action();
      expect(")");
      return a;
    }
    if (accept_kw("wait")) {
      auto lo = time_atom();
      if (accept("..")) {
        auto hi = time_atom();
        return make_action(Action::WaitRange{std::move(lo), std::move(hi)}, span_from(start.span));
      }
      return make_action(Action::Wait{std::move(lo)}, span_from(start.span));
    }
    if (accept_kw("mu")) {
      std::string v = expect_ident("recursion variable").text;
      expect("@");
      mu_.push_back(v);
      auto body = action();
      mu_.pop_back();
      return make_action(Action::Mu{v, body}, span_from(start.span));
    }
    if (accept_kw("var")) {
      auto ds = decls();
      expect("@");
      auto mark = vars_.size();
      for (const auto& d : ds) vars_.push_back(d.name);
      auto body = action();
      vars_.resize(mark);
      return make_action(Action::VarBlock{std::move(ds), body}, span_from(start.span));
    }
    if (accept_kw("if")) {
      std::vector<GuardedBranch> branches;
      do {
        auto g = expr();
        expect_kw("then");
        auto body = action_interrupt();
        branches.push_back(GuardedBranch{g, body});
      } while (accept("[]"));
      expect_kw("fi");
      return make_action(Action::Guarded{std::move(branches)}, span_from(start.span));
    }
    if (accept_kw("this")) {
      expect(".");
      std::string v = expect_ident("state variable").text;
      expect(":=");
      auto e = expr();
      return make_action(Action::Assign{v, true, e}, span_from(start.span));
    }
    if (auto k = new_kind(start)) {
      next();
      std::string type = expect_ident("type name").text;
      auto a = args();
      return make_action(Action::Alloc{*k, type, std::move(a)}, span_from(start.span));
    }
    Token n = expect_ident("action");
    if (accept(":=")) {
      auto e = expr();
      return make_action(Action::Assign{n.text, false, e}, span_from(start.span));
    }
    for (auto it = mu_.rbegin(); it != mu_.rend(); ++it)
      if (*it == n.text) return make_action(Action::RecVar{n.text}, n.span);
    return make_action(Action::Call{n.text}, n.span);
  }

  // ---- expressions --------------------------------------------------------

  ExprPtr expr() {
    DepthGuard g(*this);
    auto lhs = expr_and();
    while (accept_kw("or")) lhs = binary(BinOp::Or, lhs, expr_and());
    return lhs;
  }

  ExprPtr expr_and() {
    auto lhs = expr_not();
    while (accept_kw("and")) lhs = binary(BinOp::And, lhs, expr_not());
    return lhs;
  }

  ExprPtr expr_not() {
    DepthGuard g(*this);
    if (accept_kw("not")) return not_expr(expr_not());
    return expr_cmp();
  }

  ExprPtr expr_cmp() {
    auto lhs = expr_add();
    if (accept_kw("in")) return member(lhs, expect_ident("set name").text, false);
    if (accept_kw("notin")) return member(lhs, expect_ident("set name").text, true);
    static const std::pair<const char*, BinOp> ops[] = {
        {"=", BinOp::Eq}, {"!=", BinOp::Neq}, {"<=", BinOp::Le},
        {">=", BinOp::Ge}, {"<", BinOp::Lt},  {">", BinOp::Gt}};
    for (const auto& [sym, op] : ops) {
      if (accept(sym)) return binary(op, lhs, expr_add());
    }
    return lhs;
  }

  ExprPtr expr_add() {
    auto lhs = expr_atom();
    while (true) {
      if (accept("+")) {
        lhs = binary(BinOp::Add, lhs, expr_atom());
      } else if (accept("-")) {
        lhs = binary(BinOp::Sub, lhs, expr_atom());
      } else if (accept("^")) {
        lhs = binary(BinOp::Concat, lhs, expr_atom());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr expr_atom() {
    DepthGuard g(*this);
    Token t = peek();
    if (t.kind == TokKind::Number) {
      next();
      return num(number(t));
    }
    if (accept_kw("true")) return boolean(true);
    if (accept_kw("false")) return boolean(false);
    if (accept_kw("null")) return null_expr();
    if (accept("(")) {
      auto e = expr();
      expect(")");
      return e;
    }
    if (accept("<")) {
      std::vector<ExprPtr> items;
      if (!accept(">")) {
        do items.push_back(expr_add());
        while (accept(","));
        expect(">");
      }
      return seq_lit(std::move(items));
    }
    if (auto k = new_kind(t)) {
      next();
      std::string type = expect_ident("type name").text;
      return new_expr(*k, type, args());
    }
    Token n = expect_ident("expression");
    if (is_var(n.text)) return var_name(n.text);
    if (is_const(n.text)) return const_name(n.text);
    return var_name(n.text);
  }

  std::vector<ExprPtr> args() {
    expect("(");
    std::vector<ExprPtr> out;
    if (accept(")")) return out;
    do out.push_back(expr());
    while (accept(","));
    expect(")");
    return out;
  }

  TimeExpr time_expr() {
    auto lhs = time_atom();
    while (accept("+")) lhs = TimeExpr::sum(lhs, time_atom());
    return lhs;
  }

  TimeExpr time_atom() {
    DepthGuard g(*this);
    Token t = peek();
    if (t.kind == TokKind::Number) {
      next();
      return TimeExpr::literal(number(t));
    }
    if (accept("(")) {
      auto e = time_expr();
      expect(")");
      return e;
    }
    if (t.kind != TokKind::Ident || kKeywords.count(t.text))
      fail(t, "malformed time expression at '" + t.text + "'");
    next();
    return is_var(t.text) ? TimeExpr::variable(t.text) : TimeExpr::constant(t.text);
  }

  // ---- sets, declarations -------------------------------------------------

  ChanSet chanset() {
    expect("{|");
    ChanSet cs;
    if (accept("|}")) return cs;
    do {
      ChanRef r;
      r.channel = expect_ident("channel name").text;
      while (accept(".")) r.prefix.push_back(expr_atom());
      cs.push_back(std::move(r));
    } while (accept(","));
    expect("|}");
    return cs;
  }

  NameSet nameset() {
    expect("{");
    NameSet ns;
    if (accept("}")) return ns;
    do ns.push_back(expect_ident("variable name").text);
    while (accept(","));
    expect("}");
    return ns;
  }

  std::vector<VarDecl> decls() {
    std::vector<VarDecl> out;
    do {
      std::string n = expect_ident("variable name").text;
      expect(":");
      out.push_back(VarDecl{n, sort()});
    } while (accept(","));
    return out;
  }

  Sort sort() {
    Token t = next();
    if (t.is_ident("nat")) return Sort::Nat;
    if (t.is_ident("bool")) return Sort::Bool;
    if (t.is_ident("ID")) return Sort::Id;
    if (t.is_ident("seq")) return Sort::Seq;
    fail(t, "unknown sort '" + t.text + "' (expected nat, bool, ID or seq)");
  }

  std::vector<std::string> ident_list(const char* what) {
    std::vector<std::string> out;
    do out.push_back(expect_ident(what).text);
    while (accept(","));
    return out;
  }

 private:
  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& pp) : p(pp) {
      if (++p.depth_ > kMaxDepth) p.fail(p.peek(), "nesting too deep");
    }
    ~DepthGuard() { --p.depth_; }
  };

  const Token& peek(std::size_t k = 0) const {
    std::size_t i = pos_ + k;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }

  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    last_ = t.span;
    return t;
  }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) next();
  }

  bool accept(std::string_view sym) {
    if (peek().is(sym)) {
      next();
      return true;
    }
    return false;
  }

  bool accept_kw(std::string_view kw) {
    if (peek().is_ident(kw)) {
      next();
      return true;
    }
    return false;
  }

  void expect(std::string_view sym) {
    if (!accept(sym)) fail(peek(), "expected '" + std::string(sym) + "', found '" + peek().text + "'");
  }

  void expect_kw(std::string_view kw) {
    if (!accept_kw(kw)) fail(peek(), "expected '" + std::string(kw) + "', found '" + peek().text + "'");
  }

  Token expect_ident(const char* what) {
    const Token& t = peek();
    if (t.kind != TokKind::Ident || kKeywords.count(t.text))
      fail(t, std::string("expected ") + what + ", found '" + t.text + "'");
    return next();
  }

  std::optional<NewKind> new_kind(const Token& t) const {
    if (t.is_ident("newI")) return NewKind::NewI;
    if (t.is_ident("newM")) return NewKind::NewM;
    if (t.is_ident("newPR")) return NewKind::NewPR;
    if (t.is_ident("newPM")) return NewKind::NewPM;
    return std::nullopt;
  }

  std::int64_t number(const Token& t) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size()) fail(t, "number out of range");
    return v;
  }

  bool is_var(const std::string& n) const {
    for (auto it = vars_.rbegin(); it != vars_.rend(); ++it)
      if (*it == n) return true;
    return false;
  }

  bool is_const(const std::string& n) const {
    if (globals_.count(n)) return true;
    for (const auto& l : locals_)
      if (l == n) return true;
    return false;
  }

  SourceSpan span_from(const SourceSpan& start) const { return merge(start, last_); }

  void dup_check(bool seen, const Token& t) {
    if (seen) fail(t, "duplicate clause '" + t.text + "'");
  }

  [[noreturn]] void missing(const Token& at, const std::string& kind, const std::string& name,
                            const std::string& clause) {
    throw ParseError{Diagnostic{Severity::Error, "E-METH",
                                kind + " " + name + ": missing mandatory " + clause, at.span}};
  }

 public:
  [[noreturn]] void fail(const Token& t, const std::string& msg) {
    if (t.kind == TokKind::Eof)
      throw ParseError{Diagnostic{Severity::Error, "E-EOF", "unexpected end of input: " + msg, t.span}};
    throw ParseError{Diagnostic{Severity::Error, "E-SYNTAX", msg, t.span}};
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  SourceSpan last_;
  std::optional<Diagnostic> error_;
  std::set<std::string> globals_;
  std::vector<std::string> locals_;
  std::vector<std::string> vars_;
  std::vector<std::string> mu_;
};

}  // namespace

ParseResult<SCJProgram> parse_program(std::string_view src, const std::string& file) {
  Parser p(src, file, {});
  p.prescan();
  return p.run<SCJProgram>([](Parser& q) { return q.scj_program(); });
}

ParseResult<CircusProgram> parse_circus_program(std::string_view src, const std::string& file) {
  Parser p(src, file, {});
  p.prescan();
  return p.run<CircusProgram>([](Parser& q) { return q.circus_program(); });
}

ParseResult<ActionPtr> parse_action(std::string_view src, const ParseScope& scope) {
  Parser p(src, "", scope);
  return p.run<ActionPtr>([](Parser& q) { return q.action(); });
}

ParseResult<ProcessPtr> parse_process(std::string_view src, const ParseScope& scope) {
  Parser p(src, "", scope);
  return p.run<ProcessPtr>([](Parser& q) { return q.process(); });
}

ParseResult<ExprPtr> parse_expr(std::string_view src, const ParseScope& scope) {
  Parser p(src, "", scope);
  return p.run<ExprPtr>([](Parser& q) { return q.expr(); });
}

}  // namespace scjc
