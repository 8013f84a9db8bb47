#include <doctest.h>

#include <algorithm>
#include <random>

#include "archpat/checker.hpp"
#include "archpat/patterns.hpp"
#include "support.hpp"

using namespace archpat;
using archpat::testing::ltl_or_die;
using archpat::testing::parse_or_die;

namespace {

constexpr std::uint64_t kPathCap = 400000;

struct Sample {
  PatternSpec spec;
  testing::RefGraph graph;
  std::string formula;
  int temporal = 0;
  std::size_t bound = 0;
};

/// Draws (spec, formula) pairs whose oracle enumeration stays small enough
/// to be exhaustive; oversized draws are discarded.
std::vector<Sample> draw_samples(std::uint32_t seed, std::size_t wanted, int min_temporal, int max_temporal) {
  std::mt19937 rng(seed);
  std::vector<Sample> out;
  for (int attempt = 0; out.size() < wanted && attempt < 5000; ++attempt) {
    Sample s;
    s.spec = parse_or_die(testing::random_spec_text(rng, "C" + std::to_string(attempt)));
    s.graph = testing::reference_graph(s.spec);
    s.temporal = min_temporal + static_cast<int>(rng() % static_cast<unsigned>(max_temporal - min_temporal + 1));
    s.formula = testing::random_formula_text(rng, testing::random_spec_atoms(s.spec), s.temporal);
    s.bound = testing::lasso_bound(s.graph.states.size(), s.temporal);
    if (testing::path_count(s.graph, s.bound, kPathCap) >= kPathCap) continue;
    out.push_back(std::move(s));
  }
  return out;
}

Lasso to_lasso(const testing::RefGraph& g, const StateLayout& layout, const testing::BruteForceResult& r) {
  Lasso l;
  for (auto id : r.prefix) l.prefix.push_back(layout.encode(g.states[id]));
  for (auto id : r.cycle) l.cycle.push_back(layout.encode(g.states[id]));
  return l;
}

const char* kCounter = R"(pattern Counter

interface Tick
  in go : bool
  out top : bool
  local k : 0..2

behavior Tick states run init run
  init k := 0
  next k := case go : k + 1; true : k; esac
  define top := k = 2

architecture
  component t : Tick (go := e)
  env e : bool init false next {false, true}

property Safe : G !t.top
property Trivial : G true
)";

}  // namespace

TEST_CASE("checker agrees with exhaustive lasso enumeration") {
  const auto samples = draw_samples(4242, 40, 1, 3);
  REQUIRE(samples.size() >= 20);
  int violated = 0, held = 0;
  for (const auto& s : samples) {
    CAPTURE(s.formula);
    CAPTURE(pretty_print(s.spec));
    LtlPtr f = ltl_or_die(s.formula);
    const testing::BruteForceResult oracle = testing::brute_force(s.spec, s.graph, *f, s.bound);
    const Verdict v = check_formula(s.spec, *f);
    CHECK(v.holds == !oracle.violated);
    if (!v.holds) {
      REQUIRE(v.counterexample);
      CHECK(verify_lasso(s.spec, *f, *v.counterexample));
      ++violated;
    } else {
      ++held;
    }
    if (oracle.violated) CHECK(verify_lasso(s.spec, *f, to_lasso(s.graph, StateLayout(s.spec), oracle)));

    const std::vector<Property> props{{"P", f, {}}};
    for (int threads : {1, 2}) {
      const auto outcomes = check_properties(s.spec, props, {}, threads);
      REQUIRE(outcomes.size() == 1);
      CHECK(outcomes[0].status ==
            (oracle.violated ? PropertyOutcome::Status::Violated : PropertyOutcome::Status::Holds));
      if (outcomes[0].status == PropertyOutcome::Status::Violated) {
        REQUIRE(outcomes[0].verdict);
        REQUIRE(outcomes[0].verdict->counterexample);
        CHECK(verify_lasso(s.spec, *f, *outcomes[0].verdict->counterexample));
      }
    }
  }
  CHECK(violated >= 5);
  CHECK(held >= 5);
}

TEST_CASE("a formula and its negation never both hold") {
  for (const auto& s : draw_samples(77, 30, 1, 2)) {
    CAPTURE(s.formula);
    LtlPtr f = ltl_or_die(s.formula);
    LtlPtr nf = ltl_or_die("!(" + s.formula + ")");
    const bool pos = check_formula(s.spec, *f).holds;
    const bool neg = check_formula(s.spec, *nf).holds;
    CHECK_FALSE((pos && neg));
  }
}

TEST_CASE("product size is bounded by system times automaton") {
  for (const auto& s : draw_samples(5, 20, 1, 3)) {
    const Verdict v = check_formula(s.spec, *ltl_or_die(s.formula));
    CHECK(v.stats.system_states <= s.graph.states.size());
    CHECK(v.stats.product_states <= v.stats.system_states * v.stats.buchi_states);
    CHECK(v.stats.buchi_states >= 1);
  }
}

TEST_CASE("built-in patterns satisfy their properties") {
  for (const auto& id : {"singleton", "broker"}) {
    CAPTURE(id);
    const auto& entry = get_pattern(id);
    for (const auto& o : check_all(entry.spec)) {
      CAPTURE(o.name);
      CHECK(o.status == PropertyOutcome::Status::Holds);
    }
    for (const auto& p : entry.spec.properties) CHECK(check_property(entry.spec, p.name).holds);
  }
  CHECK_THROWS_AS(check_property(get_pattern("singleton").spec, "NoSuchProperty"), std::invalid_argument);
}

TEST_CASE("mutants yield certified counterexamples") {
  for (const auto& id : mutant_ids()) {
    CAPTURE(id);
    const Mutant& m = get_mutant(id);
    const auto outcomes = check_all(m.spec);
    REQUIRE(outcomes.size() == m.spec.properties.size());
    int violations = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      CAPTURE(outcomes[i].name);
      CHECK(outcomes[i].name == m.spec.properties[i].name);
      CHECK(outcomes[i].status != PropertyOutcome::Status::Error);
      CHECK(outcomes[i].status != PropertyOutcome::Status::Inconclusive);
      if (outcomes[i].status != PropertyOutcome::Status::Violated) continue;
      ++violations;
      REQUIRE(outcomes[i].verdict);
      REQUIRE(outcomes[i].verdict->counterexample);
      const Lasso& l = *outcomes[i].verdict->counterexample;
      CHECK_FALSE(l.cycle.empty());
      CHECK(verify_lasso(m.spec, *m.spec.properties[i].formula, l));
    }
    CHECK(violations >= 1);
  }
}

TEST_CASE("tampered lassos are rejected") {
  const Mutant& m = get_mutant("singleton_mutant_noguard");
  const auto it = std::find_if(m.spec.properties.begin(), m.spec.properties.end(),
                               [](const Property& p) { return p.name == "S2"; });
  REQUIRE(it != m.spec.properties.end());
  const Verdict v = check_formula(m.spec, *it->formula);
  REQUIRE_FALSE(v.holds);
  const Lasso good = *v.counterexample;
  CHECK(verify_lasso(m.spec, *it->formula, good));

  // The same run satisfies the negation, so it is no counterexample for it.
  LtlPtr neg = LtlFormula::unary(LtlFormula::Kind::Not, it->formula);
  const LassoDiagnosis d = diagnose_lasso(m.spec, *neg, good);
  CHECK(d.trajectory_ok);
  CHECK_FALSE(d.violates);

  System sys(m.spec);
  Workspace ws;
  std::vector<GlobalState> next;
  sys.successors(good.cycle.front(), ws, next);
  const testing::RefGraph g = testing::reference_graph(m.spec);
  std::optional<GlobalState> stranger;
  for (const auto& v : g.states) {
    GlobalState s = sys.layout().encode(v);
    if (std::find(next.begin(), next.end(), s) == next.end()) {
      stranger = s;
      break;
    }
  }
  REQUIRE(stranger);
  Lasso broken = good;
  broken.cycle.insert(broken.cycle.begin() + 1, *stranger);
  const LassoDiagnosis db = diagnose_lasso(m.spec, *it->formula, broken);
  CHECK_FALSE(db.trajectory_ok);
  CHECK_FALSE(verify_lasso(m.spec, *it->formula, broken));

  Lasso short_state = good;
  short_state.cycle.front().slots.pop_back();
  const LassoDiagnosis ds = diagnose_lasso(m.spec, *it->formula, short_state);
  CHECK_FALSE(ds.trajectory_ok);
  CHECK_FALSE(ds.problem.empty());
  CHECK_FALSE(verify_lasso(m.spec, *it->formula, Lasso{}));
}

TEST_CASE("limits make a check inconclusive") {
  const PatternSpec& mvc = get_pattern("mvc").spec;
  CheckLimits tiny;
  tiny.max_states = 500;
  CHECK_THROWS_AS(check_property(mvc, mvc.properties.front().name, tiny), Inconclusive);
  try {
    (void)check_property(mvc, mvc.properties.front().name, tiny);
  } catch (const Inconclusive& e) {
    CHECK(e.stats().system_states >= 500);
  }
  const std::vector<Property> two(mvc.properties.begin(), mvc.properties.begin() + 2);
  for (const auto& o : check_properties(mvc, two, tiny)) CHECK(o.status == PropertyOutcome::Status::Inconclusive);

  CheckLimits instant;
  instant.max_seconds = 1e-9;
  CHECK_THROWS_AS(check_property(mvc, mvc.properties.front().name, instant), Inconclusive);
  for (const auto& o : check_properties(mvc, two, instant)) CHECK(o.status == PropertyOutcome::Status::Inconclusive);
}

TEST_CASE("a violation found on a partial graph is still reported") {
  const Mutant& m = get_mutant("broker_mutant_noack");
  CheckLimits small;
  small.max_states = 2000;
  const auto outcomes = check_all(m.spec, small);
  int violated = 0;
  for (const auto& o : outcomes) {
    if (o.status != PropertyOutcome::Status::Violated) continue;
    ++violated;
    const auto& p = *std::find_if(m.spec.properties.begin(), m.spec.properties.end(),
                                  [&](const Property& q) { return q.name == o.name; });
    CHECK(verify_lasso(m.spec, *p.formula, *o.verdict->counterexample));
  }
  CHECK(violated >= 1);
}

TEST_CASE("evaluation errors surface as Error outcomes") {
  const PatternSpec spec = parse_or_die(kCounter);
  CHECK_THROWS_AS(check_property(spec, "Safe"), StateEvalError);
  try {
    (void)check_property(spec, "Safe");
  } catch (const StateEvalError& e) {
    const Valuation at = StateLayout(spec).decode(e.state());
    CHECK(at.at("t.k") == Value::integer(2));
    CHECK(e.kind() == EvalError::Kind::Range);
  }
  for (int threads : {1, 2}) {
    const auto outcomes = check_all(spec, {}, threads);
    REQUIRE(outcomes.size() == 2);
    for (const auto& o : outcomes) {
      CAPTURE(o.name);
      CHECK(o.status == PropertyOutcome::Status::Error);
      REQUIRE(o.error_state);
      CHECK(StateLayout(spec).decode(*o.error_state).at("t.k") == Value::integer(2));
      CHECK(o.message.find("t.k") != std::string::npos);
    }
  }
  CHECK(std::string(to_string(PropertyOutcome::Status::Error)) == "error");
  CHECK(std::string(to_string(PropertyOutcome::Status::Holds)) == "holds");
}
