#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "archpat/model.hpp"
#include "archpat/semantics.hpp"

namespace archpat {

// ---------------------------------------------------------------------------
// Büchi automata
// ---------------------------------------------------------------------------

/// Conjunction of atom literals: bits of `pos` must be set in the label and
/// bits of `neg` clear. The empty guard is `true`.
struct BuchiGuard {
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;

  bool satisfied_by(std::uint64_t label) const { return (label & pos) == pos && (label & neg) == 0; }
  friend bool operator==(const BuchiGuard&, const BuchiGuard&) = default;
};

struct BuchiTransition {
  int from = 0;
  BuchiGuard guard;
  int to = 0;
};

/// Transition-labeled Büchi automaton. A run starts in an initial state
/// before the first letter and reads one letter per transition; bit `i` of
/// a letter is the truth value of `atoms[i]`.
struct BuchiAutomaton {
  int state_count = 0;
  std::vector<int> initial;
  std::vector<char> accepting;
  std::vector<BuchiTransition> transitions;
  std::vector<LtlPtr> atoms;

  /// Outgoing transition indices per state.
  std::vector<std::vector<int>> outgoing() const;
};

/// Tableau translation followed by degeneralization and simplification.
/// Supports at most 64 distinct atoms (std::invalid_argument otherwise).
BuchiAutomaton to_buchi(const LtlFormula& f);

/// Distinct non-constant atoms of `f` (Atom, Active, Connected) in first
/// occurrence order.
std::vector<LtlPtr> collect_atoms(const LtlFormula& f);

/// Acceptance of the ultimately periodic word prefix·cycle^ω.
bool buchi_accepts(const BuchiAutomaton& a, const std::vector<std::uint64_t>& prefix,
                   const std::vector<std::uint64_t>& cycle);

/// Direct evaluation of `f` at position 0 of an ultimately periodic word with
/// `prefix_length` prefix positions followed by `cycle_length` repeated
/// positions. `atom_value(atom, position)` supplies atom truth values.
bool holds_on_lasso(const LtlFormula& f, std::size_t prefix_length, std::size_t cycle_length,
                    const std::function<bool(const LtlFormula& atom, std::size_t position)>& atom_value);

// ---------------------------------------------------------------------------
// Model checking
// ---------------------------------------------------------------------------

/// Ultimately periodic run: prefix followed by the cycle repeated for ever.
struct Lasso {
  std::vector<GlobalState> prefix;
  std::vector<GlobalState> cycle;
};

struct CheckStats {
  std::size_t product_states = 0;
  std::size_t system_states = 0;
  std::size_t buchi_states = 0;
  double time_ms = 0;
};

/// Counterexamples use a shortest prefix and cycle among the product states
/// the search visited; they are not globally shortest.
struct Verdict {
  bool holds = true;
  std::optional<Lasso> counterexample;  // present iff !holds
  CheckStats stats;
};

struct CheckLimits {
  std::size_t max_states = 5'000'000;
  double max_seconds = 120.0;  // <= 0: unlimited
};

/// Raised when a limit is reached before a verdict could be established.
class Inconclusive : public std::runtime_error {
 public:
  Inconclusive(const std::string& reason, CheckStats stats) : std::runtime_error(reason), stats_(stats) {}
  const CheckStats& stats() const { return stats_; }

 private:
  CheckStats stats_;
};

/// Evaluation error raised while exploring, with the state being expanded.
class StateEvalError : public EvalError {
 public:
  StateEvalError(const EvalError& e, GlobalState state) : EvalError(e), state_(std::move(state)) {}
  const GlobalState& state() const { return state_; }

 private:
  GlobalState state_;
};

/// Checks `f` on the fly: the product with the automaton of ¬f is searched
/// by nested depth-first search while system states are generated lazily.
/// Throws Inconclusive, StateEvalError, or std::invalid_argument for an
/// invalid spec.
Verdict check_formula(const PatternSpec& spec, const LtlFormula& f, const CheckLimits& limits = {});

/// check_formula on a declared property; std::invalid_argument if unknown.
Verdict check_property(const PatternSpec& spec, const std::string& prop_name, const CheckLimits& limits = {});

struct PropertyOutcome {
  enum class Status { Holds, Violated, Inconclusive, Error };

  std::string name;
  Status status = Status::Error;
  std::optional<Verdict> verdict;       // Holds / Violated
  CheckStats stats;
  std::string message;                  // Inconclusive / Error
  std::optional<GlobalState> error_state;
};

const char* to_string(PropertyOutcome::Status s);

/// Checks `properties` against one shared state graph; properties are
/// checked in parallel (`threads` <= 0: OpenMP default) and reported in
/// input order. Errors are collected per property.
std::vector<PropertyOutcome> check_properties(const PatternSpec& spec, const std::vector<Property>& properties,
                                              const CheckLimits& limits = {}, int threads = 0);

/// check_properties over every declared property.
std::vector<PropertyOutcome> check_all(const PatternSpec& spec, const CheckLimits& limits = {}, int threads = 0);

struct LassoDiagnosis {
  bool trajectory_ok = false;
  std::string problem;      // why the trajectory is not a run, when !trajectory_ok
  bool violates = false;    // the induced word falsifies the formula
};

/// Independent certificate check using the reference semantics and direct
/// LTL evaluation on the induced word.
LassoDiagnosis diagnose_lasso(const PatternSpec& spec, const LtlFormula& f, const Lasso& lasso);

/// True iff `lasso` is a run of `spec` whose word violates `f`.
bool verify_lasso(const PatternSpec& spec, const LtlFormula& f, const Lasso& lasso);

}  // namespace archpat
