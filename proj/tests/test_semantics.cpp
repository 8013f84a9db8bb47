#include <doctest.h>

#include <algorithm>
#include <deque>
#include <random>
#include <set>

#include "archpat/patterns.hpp"
#include "archpat/semantics.hpp"
#include "support.hpp"

using namespace archpat;
using archpat::testing::parse_or_die;

namespace {

const char* kLamp = R"(pattern Lamp

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
)";

std::set<Valuation> decode_all(const StateLayout& layout, const std::vector<GlobalState>& states) {
  std::set<Valuation> out;
  for (const auto& s : states) out.insert(layout.decode(s));
  return out;
}

Valuation lamp_state(const char* control, bool on, bool button) {
  return {{"lamp.controlState", Value::enumeration(control)},
          {"lamp.on", Value::boolean(on)},
          {"button", Value::boolean(button)}};
}

/// Compares the compiled system with the reference semantics on every state
/// reachable within `limit` states.
void compare_with_reference(const PatternSpec& spec, std::size_t limit) {
  System sys(spec);
  const StateLayout& layout = sys.layout();
  const auto init = sys.initial_states();
  const auto ref_init = reference::initial_states(spec);
  REQUIRE(decode_all(layout, init) == std::set<Valuation>(ref_init.begin(), ref_init.end()));

  Workspace ws;
  std::set<Valuation> seen;
  std::deque<GlobalState> queue(init.begin(), init.end());
  std::vector<GlobalState> out;
  while (!queue.empty() && seen.size() < limit) {
    GlobalState s = queue.front();
    queue.pop_front();
    const Valuation v = layout.decode(s);
    if (!seen.insert(v).second) continue;
    CHECK(layout.encode(v) == s);

    sys.successors(s, ws, out);
    std::set<Valuation> got = decode_all(layout, out);
    CHECK(got.size() == out.size());

    std::set<Valuation> want;
    for (auto& [label, next] : reference::successors(spec, v)) want.insert(next);
    CHECK(got == want);

    for (auto& [label, next] : sys.labeled_successors(s)) {
      CHECK(label == sys.label_at(s));
      CHECK(want.count(layout.decode(next)) == 1);
    }
    for (auto& n : out) queue.push_back(n);
  }
}

}  // namespace

TEST_CASE("mealy step of a single lamp") {
  const PatternSpec spec = parse_or_die(kLamp);
  System sys(spec);
  const StateLayout& layout = sys.layout();

  const auto init = sys.initial_states();
  REQUIRE(init.size() == 1);
  CHECK(layout.decode(init[0]) == lamp_state("off", false, false));

  Workspace ws;
  std::vector<GlobalState> out;
  sys.successors(init[0], ws, out);
  CHECK(decode_all(layout, out) ==
        std::set<Valuation>{lamp_state("off", false, false), lamp_state("off", false, true)});

  const GlobalState pressed = layout.encode(lamp_state("off", false, true));
  const StepLabel label = sys.label_at(pressed);
  CHECK(label.inputs.at("lamp.push") == Value::boolean(true));
  CHECK(label.outputs.at("lamp.lit") == Value::boolean(false));
  sys.successors(pressed, ws, out);
  CHECK(decode_all(layout, out) ==
        std::set<Valuation>{lamp_state("on_state", true, false), lamp_state("on_state", true, true)});

  const auto free = successors(spec, pressed);
  CHECK(free.size() == 2);
  CHECK(initial_states(spec) == init);
}

TEST_CASE("eval_expr resolves instance names and labels") {
  const PatternSpec spec = parse_or_die(kLamp);
  System sys(spec);
  const GlobalState s = sys.layout().encode(lamp_state("on_state", true, false));
  const StepLabel label = sys.label_at(s);
  auto e = parse_expr("lit & !push").expr;
  REQUIRE(e);
  CHECK(eval_expr(spec, *e, s, label, "lamp") == Value::boolean(true));
  auto q = parse_expr("lamp.lit = (!button)").expr;
  REQUIRE(q);
  CHECK(eval_expr(spec, *q, s, label) == Value::boolean(true));
  auto choice = parse_expr("{1, 2}").expr;
  REQUIRE(choice);
  CHECK_THROWS_AS(eval_expr(spec, *choice, s, label), EvalError);
}

TEST_CASE("encode rejects values outside their sort") {
  const PatternSpec spec = parse_or_die(kLamp);
  StateLayout layout(spec);
  Valuation v = lamp_state("off", false, false);
  v["lamp.on"] = Value::integer(3);
  CHECK_THROWS_AS(layout.encode(v), std::invalid_argument);
  v = lamp_state("dimmed", false, false);
  CHECK_THROWS_AS(layout.encode(v), std::invalid_argument);
  v = lamp_state("off", false, false);
  v.erase("button");
  CHECK_THROWS_AS(layout.encode(v), std::invalid_argument);
}

TEST_CASE("compiled system agrees with the reference on the built-ins") {
  for (const auto& id : pattern_ids()) {
    CAPTURE(id);
    compare_with_reference(get_pattern(id).spec, id == "mvc" ? 150 : 2000);
  }
  for (const auto& id : mutant_ids()) {
    CAPTURE(id);
    compare_with_reference(get_mutant(id).spec, 150);
  }
}

TEST_CASE("compiled system agrees with the reference on random specs") {
  std::mt19937 rng(2024);
  for (int i = 0; i < 60; ++i) {
    const std::string text = testing::random_spec_text(rng, "S" + std::to_string(i));
    CAPTURE(text);
    compare_with_reference(parse_or_die(text), 10000);
  }
}

TEST_CASE("parallel reachability matches the serial loop") {
  for (const auto& id : pattern_ids()) {
    CAPTURE(id);
    const PatternSpec& spec = get_pattern(id).spec;
    const std::optional<std::size_t> bound =
        id == "mvc" ? std::optional<std::size_t>(20000) : std::nullopt;
    const ReachabilityReport serial = reachable(spec, bound, 1);
    CHECK(serial.sample_violations.empty());
    for (int threads : {2, 4}) {
      CAPTURE(threads);
      const ReachabilityReport par = reachable(spec, bound, threads);
      CHECK(par.states_visited == serial.states_visited);
      CHECK(par.frontier_exhausted == serial.frontier_exhausted);
      CHECK(par.sample_violations.size() == serial.sample_violations.size());
    }
  }
  CHECK(reachable(get_pattern("singleton").spec).frontier_exhausted);
  CHECK_FALSE(reachable(get_pattern("mvc").spec, 1000).frontier_exhausted);
}

TEST_CASE("reachability counts match the reference graph") {
  std::mt19937 rng(99);
  for (int i = 0; i < 30; ++i) {
    const PatternSpec spec = parse_or_die(testing::random_spec_text(rng, "Q" + std::to_string(i)));
    const testing::RefGraph g = testing::reference_graph(spec);
    for (int threads : {1, 2, 4}) {
      const ReachabilityReport r = reachable(spec, std::nullopt, threads);
      CHECK(r.frontier_exhausted);
      CHECK(r.states_visited == g.states.size());
    }
  }
}

TEST_CASE("range errors are reported per state, not thrown") {
  std::string text = kLamp;
  text.replace(text.find("local on : bool"), 15, "local on : bool\n  local k : 0..2");
  text.replace(text.find("  define lit"), 0, "  next k := k + 1\n");
  text.replace(text.find("init on := false"), 16, "init on := false\n  init k := 0");
  const PatternSpec spec = parse_or_die(text);
  for (int threads : {1, 2}) {
    const ReachabilityReport r = reachable(spec, std::nullopt, threads);
    REQUIRE_FALSE(r.sample_violations.empty());
    CHECK(r.sample_violations.size() <= 8);
    const Valuation bad = StateLayout(spec).decode(r.sample_violations[0].state);
    CHECK(bad.at("lamp.k") == Value::integer(2));
    CHECK(r.sample_violations[0].message.find("lamp.k") != std::string::npos);
  }
  System sys(spec);
  Workspace ws;
  std::vector<GlobalState> out;
  Valuation v = lamp_state("off", false, false);
  v["lamp.k"] = Value::integer(2);
  CHECK_THROWS_AS(sys.successors(sys.layout().encode(v), ws, out), EvalError);
  CHECK_THROWS_AS(reference::successors(spec, v), EvalError);
}
