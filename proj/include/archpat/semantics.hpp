#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "archpat/model.hpp"

namespace archpat {

// ---------------------------------------------------------------------------
// Values and states
// ---------------------------------------------------------------------------

struct Value {
  enum class Kind { Bool, Int, Enum, Array };

  Kind kind = Kind::Bool;
  bool b = false;
  std::int64_t i = 0;
  std::string label;
  std::vector<Value> elements;

  static Value boolean(bool v);
  static Value integer(std::int64_t v);
  static Value enumeration(std::string label);
  static Value array(std::vector<Value> elements);

  friend bool operator==(const Value& a, const Value& b);
  friend bool operator<(const Value& a, const Value& b);
};

/// DSL rendering: `true`, `-1`, `Update`, `[7, 5, 3]`.
std::string to_string(const Value& v);

/// Flat variable valuation keyed `instance.port`, `instance.controlState`,
/// or the env variable name.
using Valuation = std::map<std::string, Value>;

/// Canonical encoding of one architecture configuration: a fixed slot
/// vector (see StateLayout). Equal configurations have equal encodings.
struct GlobalState {
  std::vector<std::int32_t> slots;

  friend bool operator==(const GlobalState&, const GlobalState&) = default;
};

struct GlobalStateHash {
  std::size_t operator()(const GlobalState& s) const noexcept;
};

/// Inputs and outputs of every instance during one step, keyed `instance.port`.
struct StepLabel {
  Valuation inputs;
  Valuation outputs;

  friend bool operator==(const StepLabel&, const StepLabel&) = default;
};

/// Slot assignment: per instance its control state followed by its locals
/// (arrays element-wise), then env variables. Booleans are 0/1, integers
/// raw, enum values and control states index a spec-wide label table.
class StateLayout {
 public:
  explicit StateLayout(const PatternSpec& spec);

  std::size_t slot_count() const { return slot_count_; }

  /// Stored variable names in layout order.
  const std::vector<std::string>& variables() const { return names_; }

  Valuation decode(const GlobalState& s) const;

  /// Throws std::invalid_argument when a variable is missing, unknown, or
  /// outside its sort.
  GlobalState encode(const Valuation& v) const;

  std::int32_t label_id(const std::string& label) const;  // -1 if unknown
  const std::string& label_name(std::int32_t id) const;
  const std::vector<std::string>& labels() const { return labels_; }

  struct Variable {
    std::string name;
    Sort sort;                 // control states are an enum sort
    std::size_t first_slot = 0;
    int instance = -1;         // -1 for env variables
    bool control = false;
  };
  const std::vector<Variable>& entries() const { return vars_; }
  const Variable* find(const std::string& name) const;

 private:
  std::vector<Variable> vars_;
  std::vector<std::string> names_;
  std::vector<std::string> labels_;
  std::map<std::string, std::int32_t> label_ids_;
  std::size_t slot_count_ = 0;
};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class EvalError : public std::runtime_error {
 public:
  enum class Kind { Range, MissingBranch, Choice };

  EvalError(Kind kind, std::string where, const std::string& message)
      : std::runtime_error(message), kind_(kind), where_(std::move(where)) {}

  Kind kind() const { return kind_; }
  /// The instance/port or variable being computed, e.g. `model.data[1]`.
  const std::string& where() const { return where_; }

 private:
  Kind kind_;
  std::string where_;
};

const char* to_string(EvalError::Kind kind);

// ---------------------------------------------------------------------------
// Compiled system (fast path)
// ---------------------------------------------------------------------------

namespace detail {
struct CompiledSystem;
}

/// Opaque per-thread scratch space for System evaluation.
class Workspace {
 public:
  Workspace();
  ~Workspace();
  Workspace(Workspace&&) noexcept;
  Workspace& operator=(Workspace&&) noexcept;

 private:
  friend struct detail::CompiledSystem;
  friend class System;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Atom set compiled against a System; evaluates to one bit per atom.
class AtomSet {
 public:
  std::size_t size() const { return count_; }

 private:
  friend class System;
  std::size_t count_ = 0;
  std::vector<int> roots_;
};

/// Global transition system of a validated spec, compiled to flat
/// evaluation code. Thread-safe for concurrent const use with one
/// Workspace per thread.
class System {
 public:
  /// Throws std::invalid_argument if the spec has validation errors.
  explicit System(const PatternSpec& spec);
  ~System();
  System(const System&) = delete;
  System& operator=(const System&) = delete;

  const PatternSpec& spec() const;
  const StateLayout& layout() const;

  std::vector<GlobalState> initial_states() const;

  /// Successor states in canonical order, duplicate-free.
  void successors(const GlobalState& s, Workspace& ws, std::vector<GlobalState>& out) const;

  /// Successors with their step labels (slower; for APIs and tests).
  std::vector<std::pair<StepLabel, GlobalState>> labeled_successors(const GlobalState& s) const;

  /// Inputs/outputs of the step leaving `s`.
  StepLabel label_at(const GlobalState& s) const;

  /// At most 64 atoms: Expr atoms over the architecture namespace,
  /// Active or Connected formulas. Not safe to call concurrently with
  /// other members.
  AtomSet compile_atoms(const std::vector<LtlPtr>& atoms) const;

  /// Evaluates atoms and successors of `s` in one pass over its signals.
  std::uint64_t expand(const GlobalState& s, const AtomSet& atoms, Workspace& ws, std::vector<GlobalState>& out) const;
  std::uint64_t atoms_at(const GlobalState& s, const AtomSet& atoms, Workspace& ws) const;

 private:
  std::unique_ptr<detail::CompiledSystem> impl_;
};

/// True when one port is an input whose binding reads the other port,
/// directly or through shared definitions.
bool statically_connected(const PatternSpec& spec, const PortPath& a, const PortPath& b);

/// True when `instance` has no boolean local named `active`, or it is set.
bool activation_of(const PatternSpec& spec, const Valuation& state, const std::string& instance);

// ---------------------------------------------------------------------------
// Convenience entry points (build a System per call)
// ---------------------------------------------------------------------------

std::vector<GlobalState> initial_states(const PatternSpec& spec);
std::vector<std::pair<StepLabel, GlobalState>> successors(const PatternSpec& spec, const GlobalState& s);

/// Evaluates `e` at `state`. With a non-empty `instance`, unqualified names
/// resolve inside that instance's behavior. Input and output ports are read
/// from `label` when present there and computed otherwise. Set choice is
/// rejected with EvalError::Choice.
Value eval_expr(const PatternSpec& spec, const Expr& e, const GlobalState& state, const StepLabel& label,
                const std::string& instance = "");

// ---------------------------------------------------------------------------
// Reachability
// ---------------------------------------------------------------------------

struct StateViolation {
  GlobalState state;
  std::string message;
};

struct ReachabilityReport {
  std::size_t states_visited = 0;
  bool frontier_exhausted = false;
  std::vector<StateViolation> sample_violations;  // evaluation errors, at most 8
};

/// Breadth-first exploration. `threads` = 0 uses the OpenMP default, 1 runs
/// the serial reference loop. The report does not depend on `threads`.
ReachabilityReport reachable(const PatternSpec& spec, std::optional<std::size_t> bound = std::nullopt,
                             int threads = 0);

// ---------------------------------------------------------------------------
// Reference semantics (naive, uncached; used as an oracle)
// ---------------------------------------------------------------------------

namespace reference {

std::vector<Valuation> initial_states(const PatternSpec& spec);
std::vector<std::pair<StepLabel, Valuation>> successors(const PatternSpec& spec, const Valuation& s);

/// Evaluates an expression; see archpat::eval_expr for name resolution.
Value eval(const PatternSpec& spec, const Expr& e, const Valuation& state, const StepLabel* label,
           const std::string& instance = "");

/// Evaluates an Atom, Active or Connected formula.
bool eval_atom(const PatternSpec& spec, const LtlFormula& atom, const Valuation& state);

}  // namespace reference

}  // namespace archpat
