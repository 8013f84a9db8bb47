#include "archpat/model.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace archpat {

SourceSpan SourceSpan::cover(const SourceSpan& a, const SourceSpan& b) {
  if (!a.known()) return b;
  if (!b.known()) return a;
  SourceSpan s = a;
  if (b.line_end > s.line_end || (b.line_end == s.line_end && b.col_end > s.col_end)) {
    s.line_end = b.line_end;
    s.col_end = b.col_end;
  }
  return s;
}

std::ostream& operator<<(std::ostream& os, const Diagnostic& d) {
  if (!d.span.file.empty()) os << d.span.file << ':';
  if (d.span.known()) os << d.span.line_start << ':' << d.span.col_start << ": ";
  else if (!d.span.file.empty()) os << ' ';
  os << (d.severity == Severity::Error ? "error: " : "warning: ") << d.message;
  return os;
}

// --- Sort -----------------------------------------------------------------

Sort Sort::boolean() { return Sort{}; }

Sort Sort::range(std::int64_t lo, std::int64_t hi) {
  Sort s;
  s.kind = Kind::Int;
  s.lo = lo;
  s.hi = hi;
  return s;
}

Sort Sort::array(std::int64_t index_lo, std::int64_t index_hi, Sort element) {
  Sort s;
  s.kind = Kind::Array;
  s.lo = index_lo;
  s.hi = index_hi;
  s.element = std::make_shared<const Sort>(std::move(element));
  return s;
}

Sort Sort::enumeration(std::vector<std::string> labels) {
  Sort s;
  s.kind = Kind::Enum;
  s.labels = std::move(labels);
  return s;
}

std::uint64_t Sort::cardinality() const {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  switch (kind) {
    case Kind::Bool: return 2;
    case Kind::Int: return hi < lo ? 0 : static_cast<std::uint64_t>(hi - lo) + 1;
    case Kind::Enum: return labels.size();
    case Kind::Array: {
      std::uint64_t per = element ? element->cardinality() : 0;
      std::uint64_t total = 1;
      for (std::int64_t i = lo; i <= hi; ++i) {
        if (per != 0 && total > kMax / per) return kMax;
        total *= per;
      }
      return total;
    }
  }
  return 0;
}

bool operator==(const Sort& a, const Sort& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Sort::Kind::Bool: return true;
    case Sort::Kind::Int: return a.lo == b.lo && a.hi == b.hi;
    case Sort::Kind::Enum: return a.labels == b.labels;
    case Sort::Kind::Array:
      if (a.lo != b.lo || a.hi != b.hi) return false;
      if (!a.element || !b.element) return a.element == b.element;
      return *a.element == *b.element;
  }
  return false;
}

std::string to_string(const Sort& sort) {
  switch (sort.kind) {
    case Sort::Kind::Bool: return "bool";
    case Sort::Kind::Int: return std::to_string(sort.lo) + ".." + std::to_string(sort.hi);
    case Sort::Kind::Array:
      return "array " + std::to_string(sort.lo) + ".." + std::to_string(sort.hi) + " of " +
             (sort.element ? to_string(*sort.element) : std::string("?"));
    case Sort::Kind::Enum: {
      std::string out = "{";
      for (std::size_t i = 0; i < sort.labels.size(); ++i) {
        if (i) out += ", ";
        out += sort.labels[i];
      }
      return out + "}";
    }
  }
  return "?";
}

// --- Expr -----------------------------------------------------------------

const char* to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Mod: return "mod";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "&";
    case BinaryOp::Or: return "|";
  }
  return "?";
}

namespace {
std::shared_ptr<Expr> make(Expr::Kind kind, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->span = std::move(span);
  return e;
}
}  // namespace

ExprPtr Expr::boolean(bool v, SourceSpan span) {
  auto e = make(Kind::BoolLit, std::move(span));
  e->bool_value = v;
  return e;
}

ExprPtr Expr::integer(std::int64_t v, SourceSpan span) {
  auto e = make(Kind::IntLit, std::move(span));
  e->int_value = v;
  return e;
}

ExprPtr Expr::array(std::vector<ExprPtr> elements, SourceSpan span) {
  auto e = make(Kind::ArrayLit, std::move(span));
  e->operands = std::move(elements);
  return e;
}

ExprPtr Expr::ref(std::string name, SourceSpan span) {
  auto e = make(Kind::Ref, std::move(span));
  e->name = std::move(name);
  return e;
}

ExprPtr Expr::port(std::string instance, std::string name, SourceSpan span) {
  auto e = make(Kind::Ref, std::move(span));
  e->instance = std::move(instance);
  e->name = std::move(name);
  return e;
}

ExprPtr Expr::index(ExprPtr array, ExprPtr index, SourceSpan span) {
  auto e = make(Kind::Index, std::move(span));
  e->operands = {std::move(array), std::move(index)};
  return e;
}

ExprPtr Expr::unary(UnaryOp op, ExprPtr operand, SourceSpan span) {
  auto e = make(Kind::Unary, std::move(span));
  e->unary_op = op;
  e->operands = {std::move(operand)};
  return e;
}

ExprPtr Expr::binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourceSpan span) {
  auto e = make(Kind::Binary, std::move(span));
  e->binary_op = op;
  e->operands = {std::move(lhs), std::move(rhs)};
  return e;
}

ExprPtr Expr::case_of(std::vector<Branch> branches, SourceSpan span) {
  auto e = make(Kind::Case, std::move(span));
  e->branches = std::move(branches);
  return e;
}

ExprPtr Expr::choice(std::vector<ExprPtr> values, SourceSpan span) {
  auto e = make(Kind::SetChoice, std::move(span));
  e->operands = std::move(values);
  return e;
}

bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return a == b;
  return equal(*a, *b);
}

bool equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::BoolLit: return a.bool_value == b.bool_value;
    case Expr::Kind::IntLit: return a.int_value == b.int_value;
    case Expr::Kind::Ref: return a.instance == b.instance && a.name == b.name;
    case Expr::Kind::Unary:
      if (a.unary_op != b.unary_op) return false;
      break;
    case Expr::Kind::Binary:
      if (a.binary_op != b.binary_op) return false;
      break;
    case Expr::Kind::Case:
      if (a.branches.size() != b.branches.size()) return false;
      for (std::size_t i = 0; i < a.branches.size(); ++i) {
        if (!equal(a.branches[i].condition, b.branches[i].condition)) return false;
        if (!equal(a.branches[i].value, b.branches[i].value)) return false;
      }
      return true;
    default: break;
  }
  if (a.operands.size() != b.operands.size()) return false;
  for (std::size_t i = 0; i < a.operands.size(); ++i)
    if (!equal(a.operands[i], b.operands[i])) return false;
  return true;
}

bool is_constant(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::BoolLit:
    case Expr::Kind::IntLit: return true;
    case Expr::Kind::ArrayLit:
      return std::all_of(e.operands.begin(), e.operands.end(), [](const ExprPtr& x) { return is_constant(*x); });
    case Expr::Kind::Unary: return is_constant(*e.operands[0]);
    default: return false;
  }
}

// --- Interfaces / architecture -------------------------------------------

const char* to_string(PortKind kind) {
  switch (kind) {
    case PortKind::Local: return "local";
    case PortKind::Input: return "in";
    case PortKind::Output: return "out";
  }
  return "?";
}

const PortDecl* InterfaceSpec::find_port(const std::string& port) const {
  for (const auto& p : ports)
    if (p.name == port) return &p;
  return nullptr;
}

std::vector<const PortDecl*> InterfaceSpec::ports_of(PortKind kind) const {
  std::vector<const PortDecl*> out;
  for (const auto& p : ports)
    if (p.kind == kind) out.push_back(&p);
  return out;
}

const Binding* Instance::find_binding(const std::string& port) const {
  for (const auto& b : bindings)
    if (b.port == port) return &b;
  return nullptr;
}

const Instance* ArchitectureSpec::find_instance(const std::string& name) const {
  for (const auto& i : instances)
    if (i.name == name) return &i;
  return nullptr;
}

const InterfaceSpec* PatternSpec::find_interface(const std::string& n) const {
  for (const auto& i : interfaces)
    if (i.name == n) return &i;
  return nullptr;
}

const BehaviorSpec* PatternSpec::find_behavior(const std::string& interface) const {
  for (const auto& b : behaviors)
    if (b.interface == interface) return &b;
  return nullptr;
}

const Property* PatternSpec::find_property(const std::string& n) const {
  for (const auto& p : properties)
    if (p.name == n) return &p;
  return nullptr;
}

// --- LTL ------------------------------------------------------------------

namespace {
std::shared_ptr<LtlFormula> make_ltl(LtlFormula::Kind kind, SourceSpan span) {
  auto f = std::make_shared<LtlFormula>();
  f->kind = kind;
  f->span = std::move(span);
  return f;
}
}  // namespace

LtlPtr LtlFormula::make_atom(ExprPtr e, SourceSpan span) {
  auto f = make_ltl(Kind::Atom, std::move(span));
  f->atom = std::move(e);
  return f;
}

LtlPtr LtlFormula::active(std::string instance, SourceSpan span) {
  auto f = make_ltl(Kind::Active, std::move(span));
  f->instance = std::move(instance);
  return f;
}

LtlPtr LtlFormula::connected(PortPath a, PortPath b, SourceSpan span) {
  auto f = make_ltl(Kind::Connected, std::move(span));
  f->first = std::move(a);
  f->second = std::move(b);
  return f;
}

// Boolean structure over plain atoms is kept inside a single atom, so that
// every formula has one canonical shape regardless of how it was built.
LtlPtr LtlFormula::unary(Kind kind, LtlPtr operand, SourceSpan span) {
  if (kind == Kind::Not && operand->kind == Kind::Atom) {
    SourceSpan s = span.known() ? span : operand->span;
    return make_atom(Expr::unary(UnaryOp::Not, operand->atom, s), s);
  }
  auto f = make_ltl(kind, std::move(span));
  f->operands = {std::move(operand)};
  return f;
}

LtlPtr LtlFormula::binary(Kind kind, LtlPtr lhs, LtlPtr rhs, SourceSpan span) {
  if ((kind == Kind::And || kind == Kind::Or) && lhs->kind == Kind::Atom && rhs->kind == Kind::Atom) {
    SourceSpan s = span.known() ? span : SourceSpan::cover(lhs->span, rhs->span);
    return make_atom(Expr::binary(kind == Kind::And ? BinaryOp::And : BinaryOp::Or, lhs->atom, rhs->atom, s), s);
  }
  auto f = make_ltl(kind, std::move(span));
  f->operands = {std::move(lhs), std::move(rhs)};
  return f;
}

bool equal(const LtlPtr& a, const LtlPtr& b) {
  if (!a || !b) return a == b;
  return equal(*a, *b);
}

bool equal(const LtlFormula& a, const LtlFormula& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case LtlFormula::Kind::Atom: return equal(a.atom, b.atom);
    case LtlFormula::Kind::Active: return a.instance == b.instance;
    case LtlFormula::Kind::Connected: return a.first == b.first && a.second == b.second;
    default: break;
  }
  if (a.operands.size() != b.operands.size()) return false;
  for (std::size_t i = 0; i < a.operands.size(); ++i)
    if (!equal(a.operands[i], b.operands[i])) return false;
  return true;
}

int temporal_depth_count(const LtlFormula& f) {
  int n = f.is_temporal() ? 1 : 0;
  for (const auto& op : f.operands) n += temporal_depth_count(*op);
  return n;
}

namespace ltl {
LtlPtr atom(ExprPtr e) { return LtlFormula::make_atom(std::move(e)); }
LtlPtr G(LtlPtr f) { return LtlFormula::unary(LtlFormula::Kind::Globally, std::move(f)); }
LtlPtr F(LtlPtr f) { return LtlFormula::unary(LtlFormula::Kind::Eventually, std::move(f)); }
LtlPtr X(LtlPtr f) { return LtlFormula::unary(LtlFormula::Kind::Next, std::move(f)); }
LtlPtr U(LtlPtr a, LtlPtr b) { return LtlFormula::binary(LtlFormula::Kind::Until, std::move(a), std::move(b)); }
LtlPtr lnot(LtlPtr f) { return LtlFormula::unary(LtlFormula::Kind::Not, std::move(f)); }
LtlPtr land(LtlPtr a, LtlPtr b) { return LtlFormula::binary(LtlFormula::Kind::And, std::move(a), std::move(b)); }
LtlPtr lor(LtlPtr a, LtlPtr b) { return LtlFormula::binary(LtlFormula::Kind::Or, std::move(a), std::move(b)); }
LtlPtr implies(LtlPtr a, LtlPtr b) {
  return LtlFormula::binary(LtlFormula::Kind::Implies, std::move(a), std::move(b));
}
}  // namespace ltl

// --- Structural equality of whole specs ------------------------------------

namespace {

bool equal_ports(const PortDecl& a, const PortDecl& b) {
  return a.name == b.name && a.kind == b.kind && a.sort == b.sort;
}

bool equal_assignments(const std::vector<Assignment>& a, const std::vector<Assignment>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].port != b[i].port || a[i].element != b[i].element || !equal(a[i].value, b[i].value)) return false;
  return true;
}

bool equal_defs(const std::vector<Definition>& a, const std::vector<Definition>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].name != b[i].name || !equal(a[i].value, b[i].value)) return false;
  return true;
}

template <class T, class Eq>
bool equal_lists(const std::vector<T>& a, const std::vector<T>& b, Eq eq) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!eq(a[i], b[i])) return false;
  return true;
}

}  // namespace

bool equal(const PatternSpec& a, const PatternSpec& b) {
  if (a.name != b.name) return false;
  if (!equal_lists(a.interfaces, b.interfaces, [](const InterfaceSpec& x, const InterfaceSpec& y) {
        return x.name == y.name && equal_lists(x.ports, y.ports, equal_ports);
      }))
    return false;
  if (!equal_lists(a.behaviors, b.behaviors, [](const BehaviorSpec& x, const BehaviorSpec& y) {
        return x.interface == y.interface && x.control_states == y.control_states &&
               x.initial_control == y.initial_control && equal_assignments(x.local_init, y.local_init) &&
               equal_lists(x.transitions, y.transitions,
                           [](const Transition& s, const Transition& t) {
                             return s.from == t.from && s.to == t.to && equal(s.guard, t.guard);
                           }) &&
               equal_assignments(x.local_updates, y.local_updates) && equal_defs(x.defines, y.defines);
      }))
    return false;
  const auto& aa = a.architecture;
  const auto& ba = b.architecture;
  if (!equal_lists(aa.instances, ba.instances, [](const Instance& x, const Instance& y) {
        return x.name == y.name && x.interface == y.interface &&
               equal_lists(x.bindings, y.bindings, [](const Binding& s, const Binding& t) {
                 return s.port == t.port && equal(s.value, t.value);
               });
      }))
    return false;
  if (!equal_lists(aa.env_vars, ba.env_vars, [](const EnvVar& x, const EnvVar& y) {
        return x.name == y.name && x.sort == y.sort && equal(x.init, y.init) && equal(x.next, y.next);
      }))
    return false;
  if (!equal_defs(aa.shared_defs, ba.shared_defs)) return false;
  return equal_lists(a.properties, b.properties, [](const Property& x, const Property& y) {
    return x.name == y.name && equal(x.formula, y.formula);
  });
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

}  // namespace archpat
