#include <doctest.h>

#include "archpat/parser.hpp"
#include "archpat/patterns.hpp"
#include "support.hpp"

using namespace archpat;

namespace {

const std::string kBase = R"(pattern Pair

interface Node
  in peer : 0..3
  in tick : bool
  out value : 0..3
  local count : 0..3

behavior Node states idle, busy init idle
  init count := 0
  trans idle -> busy when tick
  trans busy -> idle when count = 3
  next count := case controlState = busy : (count + 1) mod 4; true : count; esac
  define value := count

architecture
  component left : Node (peer := right.value, tick := clock)
  component right : Node (peer := left.value, tick := !clock)
  env clock : bool init false next {false, true}

property Live : G F left.value = 0
)";

std::vector<Diagnostic> diagnose(const std::string& text) {
  ParseResult r = parse_pattern(text);
  if (!r.spec) return r.diagnostics;
  return validate_spec(*r.spec);
}

std::string mutate(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE_MESSAGE(pos != std::string::npos, from);
  text.replace(pos, from.size(), to);
  return text;
}

bool has_message(const std::vector<Diagnostic>& ds, const std::string& needle) {
  for (const auto& d : ds)
    if (d.severity == Severity::Error && d.message.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("base spec and built-ins are clean") {
  CHECK(diagnose(kBase).empty());
  for (const auto& id : pattern_ids()) {
    CAPTURE(id);
    CHECK(validate_spec(get_pattern(id).spec).empty());
  }
  for (const auto& id : mutant_ids()) {
    CAPTURE(id);
    CHECK(validate_spec(get_mutant(id).spec).empty());
  }
}

TEST_CASE("single mutations are each reported") {
  struct Case {
    const char* from;
    const char* to;
    const char* expect;
  };
  const Case cases[] = {
      {"init count := 0", "init count := 0\n  init count := 1", "more than one init"},
      {"  init count := 0\n", "", "has no complete init"},
      {"trans busy -> idle", "trans busy -> nowhere", "undeclared control state 'nowhere'"},
      {"init idle", "init parked", "initial control state 'parked'"},
      {"define value := count", "define value := count = 1", "defined with sort"},
      {"define value := count", "define helper := count", "has no define"},
      {"(peer := right.value, tick := clock)", "(peer := right.value)", "is not bound"},
      {"(peer := right.value, tick := clock)", "(peer := right.value, tick := clock, tock := clock)",
       "undeclared port 'tock'"},
      {"peer := right.value, tick := clock", "peer := right.count, tick := clock", "may only read output ports"},
      {"tick := !clock", "tick := !clocks", "undeclared name 'clocks'"},
      {"when tick", "when value = 1", "reads output port"},
      {"when tick", "when count", "must be boolean"},
      {"component right : Node", "component left : Node", "duplicate"},
      {"component right : Node", "component right : Knot", "undeclared interface 'Knot'"},
      {"property Live : G F left.value = 0", "property Live : G F left.volume = 0", "undeclared port"},
      {"property Live : G F left.value = 0", "property Live : G F middle.value = 0", "undeclared instance"},
      {"next {false, true}", "next {false, 2}", "set choice mixes sorts"},
      {"define value := count", "define value := {0, 1}", "set choice is only allowed"},
      {"local count : 0..3", "local count : 3..0", "empty integer range"},
      {"in tick : bool", "in tick : bool\n  in tick : bool", "duplicate port 'tick'"},
      {"property Live : G F left.value = 0", "property Live : G F left.value = 0\nproperty Live : G true",
       "duplicate property"},
  };
  for (const auto& c : cases) {
    const std::string to = c.to, expect = c.expect;
    CAPTURE(to);
    CAPTURE(expect);
    const auto ds = diagnose(mutate(kBase, c.from, c.to));
    CHECK(has_errors(ds));
    CHECK_MESSAGE(has_message(ds, c.expect), "expected '" << c.expect << "', got " << (ds.empty() ? "" : ds[0].message));
  }
}

TEST_CASE("diagnostics point at the offending construct") {
  const std::string text = mutate(kBase, "tick := !clock", "tick := !clocks");
  const auto ds = diagnose(text);
  REQUIRE(ds.size() == 1);
  CHECK(ds[0].subject == "clocks");
  CHECK(ds[0].span.line_start == 18);
  CHECK(ds[0].span.col_start == 56);
}

TEST_CASE("combinational cycles through wiring are errors") {
  std::string text = mutate(kBase, "define value := count", "define value := case peer = 0 : 0; true : count; esac");
  const auto ds = diagnose(text);
  CHECK(has_message(ds, "combinational cycle"));
}

TEST_CASE("combinational cycles inside a behavior are errors") {
  std::string text = mutate(kBase, "define value := count", "define value := helper\n  define helper := value");
  CHECK(has_message(diagnose(text), "combinational cycle"));
}

TEST_CASE("out-of-range arithmetic into state is only a warning") {
  const std::string text = mutate(kBase, "(count + 1) mod 4", "count + 1");
  const auto ds = diagnose(text);
  CHECK_FALSE(has_errors(ds));
  REQUIRE_FALSE(ds.empty());
  CHECK(ds[0].severity == Severity::Warning);
}
