#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "archpat/diagnostics.hpp"

namespace archpat {

// ---------------------------------------------------------------------------
// Sorts
// ---------------------------------------------------------------------------

struct Sort;
using SortPtr = std::shared_ptr<const Sort>;

/// Value domain of a port, env var or expression.
///
/// Arrays hold scalar elements only (bool or integer range); the element
/// sort is shared between copies.
struct Sort {
  enum class Kind { Bool, Int, Array, Enum };

  Kind kind = Kind::Bool;
  std::int64_t lo = 0;  // Int: range, Array: index range
  std::int64_t hi = 0;
  SortPtr element;      // Array only
  std::vector<std::string> labels;  // Enum only

  static Sort boolean();
  static Sort range(std::int64_t lo, std::int64_t hi);
  static Sort array(std::int64_t index_lo, std::int64_t index_hi, Sort element);
  static Sort enumeration(std::vector<std::string> labels);

  bool is_scalar() const { return kind != Kind::Array; }
  std::int64_t length() const { return kind == Kind::Array ? hi - lo + 1 : 1; }

  /// Number of distinct values; saturates for huge ranges.
  std::uint64_t cardinality() const;

  friend bool operator==(const Sort& a, const Sort& b);
};

std::string to_string(const Sort& sort);

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class BinaryOp { Add, Sub, Mul, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnaryOp { Not, Neg };

const char* to_string(BinaryOp op);

/// Immutable expression tree. A `Ref` without an instance is resolved by
/// context: a port, define, env var, `controlState`, or an enum label.
struct Expr {
  enum class Kind { BoolLit, IntLit, ArrayLit, Ref, Index, Unary, Binary, Case, SetChoice };

  struct Branch {
    ExprPtr condition;
    ExprPtr value;
  };

  Kind kind = Kind::BoolLit;
  bool bool_value = false;
  std::int64_t int_value = 0;
  std::optional<std::string> instance;  // Ref
  std::string name;                     // Ref
  BinaryOp binary_op = BinaryOp::Add;
  UnaryOp unary_op = UnaryOp::Not;
  std::vector<ExprPtr> operands;  // ArrayLit/SetChoice elements, Index {array, index}, Unary, Binary
  std::vector<Branch> branches;   // Case
  SourceSpan span;

  static ExprPtr boolean(bool v, SourceSpan span = {});
  static ExprPtr integer(std::int64_t v, SourceSpan span = {});
  static ExprPtr array(std::vector<ExprPtr> elements, SourceSpan span = {});
  static ExprPtr ref(std::string name, SourceSpan span = {});
  static ExprPtr port(std::string instance, std::string name, SourceSpan span = {});
  static ExprPtr index(ExprPtr array, ExprPtr index, SourceSpan span = {});
  static ExprPtr unary(UnaryOp op, ExprPtr operand, SourceSpan span = {});
  static ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourceSpan span = {});
  static ExprPtr case_of(std::vector<Branch> branches, SourceSpan span = {});
  static ExprPtr choice(std::vector<ExprPtr> values, SourceSpan span = {});
};

/// Structural equality, ignoring source spans.
bool equal(const Expr& a, const Expr& b);
bool equal(const ExprPtr& a, const ExprPtr& b);

bool is_constant(const Expr& e);

// ---------------------------------------------------------------------------
// Interfaces and behavior
// ---------------------------------------------------------------------------

enum class PortKind { Local, Input, Output };

const char* to_string(PortKind kind);

struct PortDecl {
  std::string name;
  PortKind kind = PortKind::Local;
  Sort sort;
  SourceSpan span;
};

struct InterfaceSpec {
  std::string name;
  std::vector<PortDecl> ports;  // input order fixes module parameter order
  SourceSpan span;

  const PortDecl* find_port(const std::string& port) const;
  std::vector<const PortDecl*> ports_of(PortKind kind) const;
};

struct Transition {
  std::string from;
  std::string to;
  ExprPtr guard;
  SourceSpan span;
};

/// Initialization or next-state assignment to a local port, or to one
/// element of an array-typed local when `element` is set.
struct Assignment {
  std::string port;
  std::optional<std::int64_t> element;
  ExprPtr value;
  SourceSpan span;
};

/// Named combinational definition. Behaviors use these for output ports
/// and module-internal helpers; architectures for shared wiring.
struct Definition {
  std::string name;
  ExprPtr value;
  SourceSpan span;
};

/// Mealy machine over one interface. Transitions are tried in order and the
/// first enabled one fires; with none enabled the control state is kept.
struct BehaviorSpec {
  std::string interface;
  std::vector<std::string> control_states;
  std::string initial_control;
  std::vector<Assignment> local_init;
  std::vector<Transition> transitions;
  std::vector<Assignment> local_updates;
  std::vector<Definition> defines;
  SourceSpan span;
};

// ---------------------------------------------------------------------------
// Architecture
// ---------------------------------------------------------------------------

struct Binding {
  std::string port;
  ExprPtr value;
  SourceSpan span;
};

struct Instance {
  std::string name;
  std::string interface;
  std::vector<Binding> bindings;
  SourceSpan span;

  const Binding* find_binding(const std::string& port) const;
};

struct EnvVar {
  std::string name;
  Sort sort;
  ExprPtr init;
  ExprPtr next;
  SourceSpan span;
};

struct ArchitectureSpec {
  std::vector<Instance> instances;
  std::vector<EnvVar> env_vars;
  std::vector<Definition> shared_defs;
  SourceSpan span;

  const Instance* find_instance(const std::string& name) const;
};

// ---------------------------------------------------------------------------
// LTL
// ---------------------------------------------------------------------------

struct LtlFormula;
using LtlPtr = std::shared_ptr<const LtlFormula>;

struct PortPath {
  std::string instance;
  std::string port;

  friend bool operator==(const PortPath&, const PortPath&) = default;
};

struct LtlFormula {
  enum class Kind { Atom, Active, Connected, Not, And, Or, Implies, Globally, Eventually, Next, Until };

  Kind kind = Kind::Atom;
  ExprPtr atom;                 // Atom
  std::string instance;         // Active
  PortPath first, second;       // Connected
  std::vector<LtlPtr> operands; // connectives and temporal operators
  SourceSpan span;

  static LtlPtr make_atom(ExprPtr e, SourceSpan span = {});
  static LtlPtr active(std::string instance, SourceSpan span = {});
  static LtlPtr connected(PortPath a, PortPath b, SourceSpan span = {});
  static LtlPtr unary(Kind kind, LtlPtr operand, SourceSpan span = {});
  static LtlPtr binary(Kind kind, LtlPtr lhs, LtlPtr rhs, SourceSpan span = {});

  bool is_temporal() const {
    return kind == Kind::Globally || kind == Kind::Eventually || kind == Kind::Next || kind == Kind::Until;
  }
};

bool equal(const LtlFormula& a, const LtlFormula& b);
bool equal(const LtlPtr& a, const LtlPtr& b);

/// Number of temporal operator occurrences.
int temporal_depth_count(const LtlFormula& f);

// Builders that read closer to the formula text.
namespace ltl {
LtlPtr atom(ExprPtr e);
LtlPtr G(LtlPtr f);
LtlPtr F(LtlPtr f);
LtlPtr X(LtlPtr f);
LtlPtr U(LtlPtr a, LtlPtr b);
LtlPtr lnot(LtlPtr f);
LtlPtr land(LtlPtr a, LtlPtr b);
LtlPtr lor(LtlPtr a, LtlPtr b);
LtlPtr implies(LtlPtr a, LtlPtr b);
}  // namespace ltl

struct Property {
  std::string name;
  LtlPtr formula;
  SourceSpan span;
};

// ---------------------------------------------------------------------------
// Pattern
// ---------------------------------------------------------------------------

struct PatternSpec {
  std::string name;
  std::vector<InterfaceSpec> interfaces;
  std::vector<BehaviorSpec> behaviors;
  ArchitectureSpec architecture;
  std::vector<Property> properties;
  SourceSpan span;

  const InterfaceSpec* find_interface(const std::string& name) const;
  const BehaviorSpec* find_behavior(const std::string& interface) const;
  const Property* find_property(const std::string& name) const;
};

/// Structural equality ignoring spans. Used for round-trip checks.
bool equal(const PatternSpec& a, const PatternSpec& b);

/// Reserved name of the per-instance control state pseudo-port.
inline constexpr const char* kControlState = "controlState";

/// Name of the local port read by `active(c)` atoms. An instance whose
/// interface has no such boolean local is always active.
inline constexpr const char* kActivationFlag = "active";

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Checks every static invariant of the model. Returns an empty list iff the
/// spec is valid; warnings do not make a spec invalid.
std::vector<Diagnostic> validate_spec(const PatternSpec& spec);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

}  // namespace archpat
