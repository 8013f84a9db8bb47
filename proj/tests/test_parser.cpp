#include <doctest.h>

#include <random>

#include "archpat/parser.hpp"
#include "archpat/patterns.hpp"
#include "support.hpp"

using namespace archpat;
using archpat::testing::parse_or_die;

namespace {

const char* kTiny = R"(pattern Tiny

interface Lamp
  in push : bool
  out lit : bool
  local on : bool

behavior Lamp states off, on_state init off
  init on := false
  trans off -> on_state when push
  trans on_state -> off when push
  next on := case push : !on; true : on; esac
  define lit := on

architecture
  component lamp : Lamp (push := button)
  env button : bool init false next {false, true}

property P1 : G (button -> F lamp.lit)
)";

}  // namespace

TEST_CASE("built-in patterns survive print and reparse") {
  for (const auto& id : pattern_ids()) {
    CAPTURE(id);
    const PatternSpec& spec = get_pattern(id).spec;
    const std::string text = pretty_print(spec);
    ParseResult r = parse_pattern(text);
    REQUIRE(r.ok());
    CHECK(equal(*r.spec, spec));
    CHECK(pretty_print(*r.spec) == text);
  }
  for (const auto& id : mutant_ids()) {
    CAPTURE(id);
    ParseResult r = parse_pattern(pretty_print(get_mutant(id).spec));
    REQUIRE(r.ok());
    CHECK(equal(*r.spec, get_mutant(id).spec));
  }
}

TEST_CASE("shipped .arch files parse to the built-ins") {
  for (const auto& id : pattern_ids()) {
    CAPTURE(id);
    const std::string text = testing::read_text(testing::source_path("patterns/" + id + ".arch"));
    ParseResult r = parse_pattern(text, id + ".arch");
    REQUIRE(r.ok());
    CHECK(equal(*r.spec, get_pattern(id).spec));
  }
  for (const auto& id : mutant_ids()) {
    CAPTURE(id);
    const std::string text = testing::read_text(testing::source_path("patterns/" + id + ".arch"));
    ParseResult r = parse_pattern(text, id + ".arch");
    REQUIRE(r.ok());
    CHECK(equal(*r.spec, get_mutant(id).spec));
  }
}

TEST_CASE("hand-written pattern parses with locations") {
  ParseResult r = parse_pattern(kTiny, "tiny.arch");
  REQUIRE(r.ok());
  const PatternSpec& s = *r.spec;
  CHECK(s.name == "Tiny");
  REQUIRE(s.interfaces.size() == 1);
  CHECK(s.interfaces[0].ports.size() == 3);
  CHECK(s.interfaces[0].ports[0].span.line_start == 4);
  CHECK(s.interfaces[0].ports[0].span.col_start == 3);
  CHECK(s.interfaces[0].ports[0].span.file == "tiny.arch");
  REQUIRE(s.properties.size() == 1);
  CHECK(s.properties[0].span.line_start == 19);
  CHECK(validate_spec(s).empty());
  ParseResult again = parse_pattern(pretty_print(s));
  REQUIRE(again.ok());
  CHECK(equal(*again.spec, s));
}

TEST_CASE("syntax errors carry line and column") {
  std::string bad = kTiny;
  bad.replace(bad.find("trans off -> on_state when push"), 31, "trans off on_state when push");
  ParseResult r = parse_pattern(bad, "bad.arch");
  CHECK_FALSE(r.ok());
  REQUIRE_FALSE(r.diagnostics.empty());
  const Diagnostic& d = r.diagnostics.front();
  CHECK(d.severity == Severity::Error);
  CHECK(d.span.file == "bad.arch");
  CHECK(d.span.line_start == 10);
  CHECK(d.span.col_start == 13);
}

TEST_CASE("parser recovers and reports several errors") {
  std::string bad = kTiny;
  bad.replace(bad.find("init on := false"), 16, "init on := ");
  bad.replace(bad.find("define lit := on"), 16, "define lit on");
  ParseResult r = parse_pattern(bad);
  CHECK_FALSE(r.ok());
  CHECK(r.diagnostics.size() >= 2);
}

TEST_CASE("LTL precedence: unary operators bind tighter than binary ones") {
  auto f = testing::ltl_or_die("G a -> F b");
  CHECK(f->kind == LtlFormula::Kind::Implies);
  auto g = testing::ltl_or_die("G (a -> F b)");
  CHECK(g->kind == LtlFormula::Kind::Globally);
  auto u = testing::ltl_or_die("a U b & c");
  CHECK(u->kind == LtlFormula::Kind::And);
  auto folded = testing::ltl_or_die("!a & b | c = 1");
  CHECK(folded->kind == LtlFormula::Kind::Atom);
  CHECK(to_dsl(*testing::ltl_or_die(to_dsl(*f))) == to_dsl(*f));
}

TEST_CASE("expressions print and reparse") {
  for (const char* text : {"-1", "- (-1)", "(a + 1) mod 3", "a - (b - c)", "x[i + 1] = 2", "!(a & b) | c",
                           "case a : 1; b : 2; true : 3; esac", "[1, 2, 3]", "{1, 2}", "a.b != -3"}) {
    CAPTURE(text);
    ExprParseResult r = parse_expr(text);
    REQUIRE(r.expr);
    ExprParseResult again = parse_expr(to_dsl(*r.expr));
    REQUIRE(again.expr);
    CHECK(equal(*r.expr, *again.expr));
  }
}

TEST_CASE("random specs round-trip") {
  std::mt19937 rng(7);
  for (int i = 0; i < 100; ++i) {
    const std::string text = testing::random_spec_text(rng, "R" + std::to_string(i));
    CAPTURE(text);
    PatternSpec s = parse_or_die(text);
    ParseResult again = parse_pattern(pretty_print(s));
    REQUIRE(again.ok());
    CHECK(equal(*again.spec, s));
  }
}

TEST_CASE("mangled input never throws") {
  std::mt19937 rng(11);
  const std::string base = pretty_print(get_pattern("broker").spec);
  const std::string alphabet = "();:=<>-!&|{}[],.\n abcxyz019";
  for (int i = 0; i < 300; ++i) {
    std::string text = base;
    const int edits = 1 + static_cast<int>(rng() % 6);
    for (int e = 0; e < edits; ++e) {
      const std::size_t pos = rng() % text.size();
      switch (rng() % 3) {
        case 0: text.erase(pos, 1 + rng() % 8); break;
        case 1: text.insert(pos, 1, alphabet[rng() % alphabet.size()]); break;
        default: text[pos] = alphabet[rng() % alphabet.size()]; break;
      }
    }
    ParseResult r;
    CHECK_NOTHROW(r = parse_pattern(text));
    if (r.ok()) CHECK_NOTHROW((void)validate_spec(*r.spec));
    for (const auto& d : r.diagnostics) CHECK(d.span.line_start >= 1);
  }
}
