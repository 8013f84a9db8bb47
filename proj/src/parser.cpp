#include <map>
#include <set>

#include "archpat/parser.hpp"
#include "lexer.hpp"

namespace archpat {

namespace {

using detail::Token;
using detail::TokenKind;

constexpr int kMaxDepth = 200;

struct Failure {};  // a diagnostic has been recorded; unwind to the statement loop

class Parser {
 public:
  Parser(std::string_view text, std::string file) : file_(std::move(file)) {
    tokens_ = detail::tokenize(text, file_, diags_);
  }

  ParseResult parse_spec() {
    ParseResult result;
    PatternSpec spec;
    if (peek().kind == TokenKind::End) {
      error_at(SourceSpan{file_, 1, 1, 1, 1}, "empty input: expected a pattern header", "");
      result.diagnostics = std::move(diags_);
      return result;
    }
    try {
      const Token& kw = expect_kw("pattern", "'pattern' header");
      Token name = expect_ident("pattern name");
      spec.name = name.text;
      spec.span = cover(kw.span, name.span);
    } catch (Failure&) {
      resync();
    }
    bool have_arch = false;
    while (peek().kind != TokenKind::End) {
      const Token& t = peek();
      try {
        if (t.kw("interface")) {
          parse_interface(spec);
        } else if (t.kw("behavior")) {
          parse_behavior(spec);
        } else if (t.kw("architecture")) {
          if (have_arch) error_at(t.span, "duplicate architecture block", t.text);
          have_arch = true;
          parse_architecture(spec);
        } else if (t.kw("property")) {
          parse_property(spec);
        } else if (t.kw("pattern")) {
          error_at(t.span, "duplicate 'pattern' header", t.text);
          throw Failure{};
        } else {
          fail("expected 'interface', 'behavior', 'architecture' or 'property'", t);
        }
      } catch (Failure&) {
        resync();
      }
    }
    if (spec.span.known()) spec.span = cover(spec.span, last_span_);
    result.diagnostics = std::move(diags_);
    if (!has_errors(result.diagnostics)) result.spec = std::move(spec);
    return result;
  }

  LtlParseResult parse_formula_only() {
    LtlParseResult r;
    try {
      if (peek().kind == TokenKind::End) {
        error_at(peek().span, "empty formula", "");
        throw Failure{};
      }
      r.formula = parse_ltl_implies();
      if (peek().kind != TokenKind::End) fail("unexpected trailing input", peek());
    } catch (Failure&) {
      r.formula = nullptr;
    }
    r.diagnostics = std::move(diags_);
    if (has_errors(r.diagnostics)) r.formula = nullptr;
    return r;
  }

  ExprParseResult parse_expr_only() {
    ExprParseResult r;
    try {
      if (peek().kind == TokenKind::End) {
        error_at(peek().span, "empty expression", "");
        throw Failure{};
      }
      r.expr = parse_expr();
      if (peek().kind != TokenKind::End) fail("unexpected trailing input", peek());
    } catch (Failure&) {
      r.expr = nullptr;
    }
    r.diagnostics = std::move(diags_);
    if (has_errors(r.diagnostics)) r.expr = nullptr;
    return r;
  }

 private:
  std::string file_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic> diags_;
  SourceSpan last_span_;
  int depth_ = 0;

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxDepth) {
        p.error_at(p.peek().span, "expression nesting is too deep", p.peek().text);
        --p.depth_;
        throw Failure{};
      }
    }
    ~DepthGuard() { --p.depth_; }
  };

  // --- token helpers ----------------------------------------------------

  const Token& peek(std::size_t k = 0) const {
    return tokens_[std::min(pos_ + k, tokens_.size() - 1)];
  }

  const Token& advance() {
    const Token& t = tokens_[pos_];
    if (t.kind != TokenKind::End) {
      ++pos_;
      last_span_ = t.span;
    }
    return t;
  }

  static SourceSpan cover(const SourceSpan& a, const SourceSpan& b) { return SourceSpan::cover(a, b); }

  void error_at(const SourceSpan& span, std::string msg, std::string subject) {
    diags_.push_back({Severity::Error, std::move(msg), span, std::move(subject)});
  }

  static std::string describe(const Token& t) {
    if (t.kind == TokenKind::End) return "end of input";
    return "'" + t.text + "'";
  }

  [[noreturn]] void fail(const std::string& what, const Token& t) {
    error_at(t.span, what + ", found " + describe(t), t.text);
    throw Failure{};
  }

  bool accept_sym(std::string_view s) {
    if (peek().sym(s)) {
      advance();
      return true;
    }
    return false;
  }

  const Token& expect_sym(std::string_view s) {
    if (!peek().sym(s)) fail("expected '" + std::string(s) + "'", peek());
    return advance();
  }

  const Token& expect_kw(std::string_view s, const std::string& what) {
    if (!peek().kw(s)) fail("expected " + what, peek());
    return advance();
  }

  Token expect_ident(const std::string& what) {
    if (peek().kind != TokenKind::Ident) {
      if (peek().kind == TokenKind::Keyword) fail("expected " + what + " (keywords are reserved)", peek());
      fail("expected " + what, peek());
    }
    return advance();
  }

  std::int64_t expect_int(const std::string& what, SourceSpan* span = nullptr) {
    SourceSpan s = peek().span;
    bool neg = accept_sym("-");
    if (peek().kind != TokenKind::Int) fail("expected " + what, peek());
    const Token& t = advance();
    if (span) *span = cover(s, t.span);
    return neg ? -t.value : t.value;
  }

  static bool section_keyword(const Token& t) {
    return t.kw("interface") || t.kw("behavior") || t.kw("architecture") || t.kw("property") || t.kw("pattern");
  }

  static bool statement_keyword(const Token& t) {
    return t.kw("local") || t.kw("in") || t.kw("out") || t.kw("init") || t.kw("trans") || t.kw("next") ||
           t.kw("define") || t.kw("component") || t.kw("env");
  }

  /// Skips at least one token, then up to the next line that starts with a
  /// statement or section keyword.
  void resync() {
    if (peek().kind != TokenKind::End) advance();
    while (peek().kind != TokenKind::End) {
      const Token& t = peek();
      if (t.line_start && (section_keyword(t) || statement_keyword(t))) return;
      advance();
    }
  }

  // --- sections ---------------------------------------------------------

  Sort parse_sort() {
    DepthGuard guard(*this);
    if (peek().kw("bool")) {
      advance();
      return Sort::boolean();
    }
    if (peek().kw("array")) {
      advance();
      SourceSpan span;
      std::int64_t lo = expect_int("array index lower bound", &span);
      expect_sym("..");
      std::int64_t hi = expect_int("array index upper bound");
      if (lo > hi) error_at(cover(span, last_span_), "empty array index range", std::to_string(lo));
      expect_kw("of", "'of'");
      SourceSpan elem_start = peek().span;
      Sort elem = parse_sort();
      if (elem.kind != Sort::Kind::Bool && elem.kind != Sort::Kind::Int) {
        error_at(cover(elem_start, last_span_), "array elements must be bool or an integer range", "array");
        throw Failure{};
      }
      return Sort::array(lo, hi, std::move(elem));
    }
    if (peek().sym("{")) {
      advance();
      std::vector<std::string> labels;
      std::set<std::string> seen;
      do {
        Token l = expect_ident("enumeration label");
        if (!seen.insert(l.text).second) error_at(l.span, "duplicate enumeration label '" + l.text + "'", l.text);
        labels.push_back(l.text);
      } while (accept_sym(","));
      expect_sym("}");
      return Sort::enumeration(std::move(labels));
    }
    if (peek().kind == TokenKind::Int || peek().sym("-")) {
      SourceSpan span;
      std::int64_t lo = expect_int("range lower bound", &span);
      expect_sym("..");
      std::int64_t hi = expect_int("range upper bound");
      if (lo > hi) error_at(cover(span, last_span_), "empty integer range", std::to_string(lo));
      return Sort::range(lo, hi);
    }
    fail("expected a sort ('bool', 'lo..hi', 'array', or '{labels}')", peek());
  }

  void parse_interface(PatternSpec& spec) {
    const Token& kw = advance();
    InterfaceSpec iface;
    Token name = expect_ident("interface name");
    iface.name = name.text;
    iface.span = cover(kw.span, name.span);
    for (const auto& other : spec.interfaces)
      if (other.name == iface.name) error_at(name.span, "duplicate interface '" + name.text + "'", name.text);
    std::set<std::string> ports;
    while (peek().kw("local") || peek().kw("in") || peek().kw("out")) {
      try {
        const Token& k = advance();
        PortDecl port;
        port.kind = k.text == "local" ? PortKind::Local : k.text == "in" ? PortKind::Input : PortKind::Output;
        Token pn = expect_ident("port name");
        port.name = pn.text;
        expect_sym(":");
        port.sort = parse_sort();
        port.span = cover(k.span, last_span_);
        if (!ports.insert(port.name).second)
          error_at(pn.span, "duplicate port '" + pn.text + "' in interface '" + iface.name + "'", pn.text);
        iface.ports.push_back(std::move(port));
      } catch (Failure&) {
        resync();
      }
    }
    iface.span = cover(iface.span, last_span_);
    spec.interfaces.push_back(std::move(iface));
  }

  Assignment parse_assignment(const Token& kw) {
    Assignment a;
    Token pn = expect_ident("port name");
    a.port = pn.text;
    if (accept_sym("[")) {
      a.element = expect_int("element index");
      expect_sym("]");
    }
    expect_sym(":=");
    a.value = parse_expr();
    a.span = cover(kw.span, last_span_);
    return a;
  }

  void parse_behavior(PatternSpec& spec) {
    const Token& kw = advance();
    BehaviorSpec b;
    Token name = expect_ident("interface name");
    b.interface = name.text;
    for (const auto& other : spec.behaviors)
      if (other.interface == b.interface) error_at(name.span, "duplicate behavior for '" + name.text + "'", name.text);
    expect_kw("states", "'states'");
    std::set<std::string> states;
    do {
      Token s = expect_ident("control state");
      if (!states.insert(s.text).second) error_at(s.span, "duplicate control state '" + s.text + "'", s.text);
      b.control_states.push_back(s.text);
    } while (accept_sym(","));
    expect_kw("init", "'init' and the initial control state");
    Token init = expect_ident("initial control state");
    b.initial_control = init.text;
    b.span = cover(kw.span, init.span);

    std::set<std::string> defines;
    while (statement_keyword(peek())) {
      const Token& t = peek();
      if (t.kw("local") || t.kw("in") || t.kw("out") || t.kw("component") || t.kw("env")) break;
      try {
        const Token& k = advance();
        if (k.text == "init") {
          b.local_init.push_back(parse_assignment(k));
        } else if (k.text == "next") {
          b.local_updates.push_back(parse_assignment(k));
        } else if (k.text == "trans") {
          Transition tr;
          tr.from = expect_ident("source control state").text;
          expect_sym("->");
          tr.to = expect_ident("target control state").text;
          expect_kw("when", "'when'");
          tr.guard = parse_expr();
          tr.span = cover(k.span, last_span_);
          b.transitions.push_back(std::move(tr));
        } else {
          Definition d;
          Token dn = expect_ident("define name");
          d.name = dn.text;
          expect_sym(":=");
          d.value = parse_expr();
          d.span = cover(k.span, last_span_);
          if (!defines.insert(d.name).second) error_at(dn.span, "duplicate define '" + dn.text + "'", dn.text);
          b.defines.push_back(std::move(d));
        }
      } catch (Failure&) {
        resync();
      }
    }
    b.span = cover(b.span, last_span_);
    spec.behaviors.push_back(std::move(b));
  }

  void parse_architecture(PatternSpec& spec) {
    const Token& kw = advance();
    ArchitectureSpec& arch = spec.architecture;
    arch.span = kw.span;
    std::set<std::string> names;
    for (const auto& i : arch.instances) names.insert(i.name);
    for (const auto& e : arch.env_vars) names.insert(e.name);
    for (const auto& d : arch.shared_defs) names.insert(d.name);
    auto claim = [&](const Token& n) {
      if (!names.insert(n.text).second) error_at(n.span, "duplicate architecture name '" + n.text + "'", n.text);
    };
    while (peek().kw("component") || peek().kw("env") || peek().kw("define")) {
      try {
        const Token& k = advance();
        if (k.text == "component") {
          Instance inst;
          Token n = expect_ident("component name");
          claim(n);
          inst.name = n.text;
          expect_sym(":");
          inst.interface = expect_ident("interface name").text;
          expect_sym("(");
          std::set<std::string> bound;
          if (!peek().sym(")")) {
            do {
              Binding bnd;
              Token pn = expect_ident("input port name");
              bnd.port = pn.text;
              expect_sym(":=");
              bnd.value = parse_expr();
              bnd.span = cover(pn.span, last_span_);
              if (!bound.insert(pn.text).second) error_at(pn.span, "input port '" + pn.text + "' bound twice", pn.text);
              inst.bindings.push_back(std::move(bnd));
            } while (accept_sym(","));
          }
          expect_sym(")");
          inst.span = cover(k.span, last_span_);
          arch.instances.push_back(std::move(inst));
        } else if (k.text == "env") {
          EnvVar env;
          Token n = expect_ident("env variable name");
          claim(n);
          env.name = n.text;
          expect_sym(":");
          env.sort = parse_sort();
          expect_kw("init", "'init'");
          env.init = parse_expr();
          expect_kw("next", "'next'");
          env.next = parse_expr();
          env.span = cover(k.span, last_span_);
          arch.env_vars.push_back(std::move(env));
        } else {
          Definition d;
          Token n = expect_ident("define name");
          claim(n);
          d.name = n.text;
          expect_sym(":=");
          d.value = parse_expr();
          d.span = cover(k.span, last_span_);
          arch.shared_defs.push_back(std::move(d));
        }
      } catch (Failure&) {
        resync();
      }
    }
    arch.span = cover(arch.span, last_span_);
  }

  void parse_property(PatternSpec& spec) {
    const Token& kw = advance();
    Property p;
    Token n = expect_ident("property name");
    p.name = n.text;
    for (const auto& other : spec.properties)
      if (other.name == p.name) error_at(n.span, "duplicate property '" + n.text + "'", n.text);
    expect_sym(":");
    p.formula = parse_ltl_implies();
    p.span = cover(kw.span, last_span_);
    spec.properties.push_back(std::move(p));
  }

  // --- expressions ------------------------------------------------------

  ExprPtr parse_expr() {
    DepthGuard guard(*this);
    return parse_or();
  }

  ExprPtr parse_or() {
    ExprPtr lhs = parse_and();
    while (peek().sym("|")) {
      advance();
      ExprPtr rhs = parse_and();
      lhs = Expr::binary(BinaryOp::Or, lhs, rhs, cover(lhs->span, rhs->span));
    }
    return lhs;
  }

  ExprPtr parse_and() {
    ExprPtr lhs = parse_not();
    while (peek().sym("&")) {
      advance();
      ExprPtr rhs = parse_not();
      lhs = Expr::binary(BinaryOp::And, lhs, rhs, cover(lhs->span, rhs->span));
    }
    return lhs;
  }

  ExprPtr parse_not() {
    if (peek().sym("!")) {
      DepthGuard guard(*this);
      const Token& t = advance();
      ExprPtr operand = parse_not();
      return Expr::unary(UnaryOp::Not, operand, cover(t.span, operand->span));
    }
    return parse_cmp();
  }

  static bool comparison(const Token& t, BinaryOp& op) {
    if (t.kind != TokenKind::Symbol) return false;
    if (t.text == "=" || t.text == "==") op = BinaryOp::Eq;
    else if (t.text == "!=") op = BinaryOp::Ne;
    else if (t.text == "<") op = BinaryOp::Lt;
    else if (t.text == "<=") op = BinaryOp::Le;
    else if (t.text == ">") op = BinaryOp::Gt;
    else if (t.text == ">=") op = BinaryOp::Ge;
    else return false;
    return true;
  }

  ExprPtr parse_cmp() {
    ExprPtr lhs = parse_add();
    BinaryOp op;
    if (comparison(peek(), op)) {
      advance();
      ExprPtr rhs = parse_add();
      lhs = Expr::binary(op, lhs, rhs, cover(lhs->span, rhs->span));
      if (comparison(peek(), op)) fail("comparison operators do not chain; add parentheses", peek());
    }
    return lhs;
  }

  ExprPtr parse_add() {
    ExprPtr lhs = parse_mul();
    while (peek().sym("+") || peek().sym("-")) {
      BinaryOp op = advance().text == "+" ? BinaryOp::Add : BinaryOp::Sub;
      ExprPtr rhs = parse_mul();
      lhs = Expr::binary(op, lhs, rhs, cover(lhs->span, rhs->span));
    }
    return lhs;
  }

  ExprPtr parse_mul() {
    ExprPtr lhs = parse_unary();
    while (peek().sym("*") || peek().kw("mod")) {
      BinaryOp op = advance().text == "*" ? BinaryOp::Mul : BinaryOp::Mod;
      ExprPtr rhs = parse_unary();
      lhs = Expr::binary(op, lhs, rhs, cover(lhs->span, rhs->span));
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    if (peek().sym("-")) {
      DepthGuard guard(*this);
      const Token& minus = advance();
      if (peek().kind == TokenKind::Int) {
        const Token& n = advance();
        return Expr::integer(-n.value, cover(minus.span, n.span));
      }
      ExprPtr operand = parse_unary();
      return Expr::unary(UnaryOp::Neg, operand, cover(minus.span, operand->span));
    }
    return parse_postfix();
  }

  ExprPtr parse_postfix() {
    ExprPtr e = parse_primary();
    while (peek().sym("[")) {
      advance();
      ExprPtr idx = parse_expr();
      expect_sym("]");
      e = Expr::index(e, idx, cover(e->span, last_span_));
    }
    return e;
  }

  std::vector<ExprPtr> parse_list(std::string_view close) {
    std::vector<ExprPtr> items;
    if (peek().sym(close)) fail("expected at least one element", peek());
    do items.push_back(parse_expr());
    while (accept_sym(","));
    expect_sym(close);
    return items;
  }

  ExprPtr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Int: {
        const Token& n = advance();
        return Expr::integer(n.value, n.span);
      }
      case TokenKind::Ident: {
        Token first = advance();
        if (peek().sym(".") && peek(1).kind == TokenKind::Ident) {
          advance();
          const Token& port = advance();
          return Expr::port(first.text, port.text, cover(first.span, port.span));
        }
        return Expr::ref(first.text, first.span);
      }
      case TokenKind::Keyword:
        if (t.text == "true" || t.text == "false") {
          const Token& b = advance();
          return Expr::boolean(b.text == "true", b.span);
        }
        if (t.text == "case") return parse_case();
        break;
      case TokenKind::Symbol:
        if (t.text == "(") {
          DepthGuard guard(*this);
          advance();
          ExprPtr inner = parse_expr();
          expect_sym(")");
          return inner;
        }
        if (t.text == "[" || t.text == "{") {
          DepthGuard guard(*this);
          const Token& open = advance();
          bool array = open.text == "[";
          SourceSpan start = open.span;
          auto items = parse_list(array ? "]" : "}");
          SourceSpan span = cover(start, last_span_);
          return array ? Expr::array(std::move(items), span) : Expr::choice(std::move(items), span);
        }
        break;
      case TokenKind::End: break;
    }
    fail("expected an expression", t);
  }

  ExprPtr parse_case() {
    DepthGuard guard(*this);
    const Token& kw = advance();
    SourceSpan start = kw.span;
    std::vector<Expr::Branch> branches;
    while (!peek().kw("esac")) {
      Expr::Branch br;
      br.condition = parse_expr();
      expect_sym(":");
      br.value = parse_expr();
      branches.push_back(std::move(br));
      if (!accept_sym(";") && !peek().kw("esac")) fail("expected ';' or 'esac'", peek());
    }
    advance();
    if (branches.empty()) {
      error_at(cover(start, last_span_), "case without branches", "case");
      throw Failure{};
    }
    return Expr::case_of(std::move(branches), cover(start, last_span_));
  }

  // --- LTL --------------------------------------------------------------

  bool ltl_op(std::string_view name) const {
    const Token& t = peek();
    if (t.kind != TokenKind::Ident || t.text != name) return false;
    const Token& n = peek(1);
    return !(n.sym(".") || n.sym("[") || n.sym(":=") || n.sym("=") || n.sym("!=") || n.sym("<") || n.sym("<=") ||
             n.sym(">") || n.sym(">=") || n.sym("+") || n.sym("*") || n.kw("mod"));
  }

  LtlPtr parse_ltl_implies() {
    DepthGuard guard(*this);
    LtlPtr lhs = parse_ltl_or();
    if (peek().sym("->")) {
      advance();
      LtlPtr rhs = parse_ltl_implies();
      return LtlFormula::binary(LtlFormula::Kind::Implies, lhs, rhs, cover(lhs->span, rhs->span));
    }
    return lhs;
  }

  LtlPtr parse_ltl_or() {
    LtlPtr lhs = parse_ltl_and();
    while (peek().sym("|")) {
      advance();
      LtlPtr rhs = parse_ltl_and();
      lhs = LtlFormula::binary(LtlFormula::Kind::Or, lhs, rhs, cover(lhs->span, rhs->span));
    }
    return lhs;
  }

  LtlPtr parse_ltl_and() {
    LtlPtr lhs = parse_ltl_until();
    while (peek().sym("&")) {
      advance();
      LtlPtr rhs = parse_ltl_until();
      lhs = LtlFormula::binary(LtlFormula::Kind::And, lhs, rhs, cover(lhs->span, rhs->span));
    }
    return lhs;
  }

  LtlPtr parse_ltl_until() {
    LtlPtr lhs = parse_ltl_unary();
    if (ltl_op("U")) {
      DepthGuard guard(*this);
      advance();
      LtlPtr rhs = parse_ltl_until();
      return LtlFormula::binary(LtlFormula::Kind::Until, lhs, rhs, cover(lhs->span, rhs->span));
    }
    return lhs;
  }

  LtlPtr parse_ltl_unary() {
    using K = LtlFormula::Kind;
    const Token& t = peek();
    K kind;
    if (t.sym("!")) kind = K::Not;
    else if (ltl_op("G")) kind = K::Globally;
    else if (ltl_op("F")) kind = K::Eventually;
    else if (ltl_op("X")) kind = K::Next;
    else return parse_ltl_primary();
    DepthGuard guard(*this);
    SourceSpan start = advance().span;
    LtlPtr operand = parse_ltl_unary();
    return LtlFormula::unary(kind, operand, cover(start, operand->span));
  }

  PortPath parse_port_path() {
    PortPath p;
    p.instance = expect_ident("instance name").text;
    expect_sym(".");
    p.port = expect_ident("port name").text;
    return p;
  }

  LtlPtr parse_ltl_primary() {
    const Token& t = peek();
    if (t.kind == TokenKind::Ident && t.text == "active" && peek(1).sym("(")) {
      SourceSpan start = advance().span;
      advance();
      std::string inst = expect_ident("instance name").text;
      expect_sym(")");
      return LtlFormula::active(inst, cover(start, last_span_));
    }
    if (t.kind == TokenKind::Ident && t.text == "conn" && peek(1).sym("(")) {
      SourceSpan start = advance().span;
      advance();
      PortPath a = parse_port_path();
      expect_sym(",");
      PortPath b = parse_port_path();
      expect_sym(")");
      return LtlFormula::connected(a, b, cover(start, last_span_));
    }
    if (t.sym("(")) {
      // A parenthesized expression atom, or failing that a parenthesized formula.
      const std::size_t saved_pos = pos_;
      const std::size_t saved_diags = diags_.size();
      const SourceSpan saved_last = last_span_;
      try {
        ExprPtr e = parse_cmp();
        return LtlFormula::make_atom(e, e->span);
      } catch (Failure&) {
        pos_ = saved_pos;
        diags_.resize(saved_diags);
        last_span_ = saved_last;
      }
      DepthGuard guard(*this);
      SourceSpan start = advance().span;
      LtlPtr inner = parse_ltl_implies();
      expect_sym(")");
      (void)start;
      return inner;
    }
    ExprPtr e = parse_cmp();
    return LtlFormula::make_atom(e, e->span);
  }
};

}  // namespace

ParseResult parse_pattern(std::string_view text, const std::string& file) {
  return Parser(text, file).parse_spec();
}

LtlParseResult parse_ltl(std::string_view text, const std::string& file) {
  return Parser(text, file).parse_formula_only();
}

ExprParseResult parse_expr(std::string_view text, const std::string& file) {
  return Parser(text, file).parse_expr_only();
}

}  // namespace archpat
