// Direct AST interpreter over name->value maps. Every reference is
// recomputed from scratch; nothing is cached or compiled.

#include <algorithm>

#include "archpat/parser.hpp"
#include "archpat/semantics.hpp"
#include "scope.hpp"

namespace archpat {

namespace reference {

namespace {

using detail::NameInfo;
using detail::NameKind;

struct Interp {
  const PatternSpec& spec;
  detail::Scope scope;
  const Valuation& state;
  const StepLabel* label;

  Interp(const PatternSpec& s, const Valuation& st, const StepLabel* l) : spec(s), scope(s), state(st), label(l) {}

  const Instance& inst(int k) const { return spec.architecture.instances[static_cast<std::size_t>(k)]; }

  Value stored(const std::string& name) const {
    auto it = state.find(name);
    if (it == state.end()) throw std::invalid_argument("state has no variable '" + name + "'");
    return it->second;
  }

  static void check_sort(const Value& v, const Sort& sort, const std::string& where) {
    switch (sort.kind) {
      case Sort::Kind::Int:
        if (v.i < sort.lo || v.i > sort.hi)
          throw EvalError(EvalError::Kind::Range, where,
                          "value " + std::to_string(v.i) + " of " + where + " leaves " + to_string(sort));
        return;
      case Sort::Kind::Enum:
        if (std::find(sort.labels.begin(), sort.labels.end(), v.label) == sort.labels.end())
          throw EvalError(EvalError::Kind::Range, where, "value " + v.label + " of " + where + " leaves " + to_string(sort));
        return;
      case Sort::Kind::Array:
        for (std::size_t k = 0; k < v.elements.size(); ++k)
          check_sort(v.elements[k], *sort.element, where + "[" + std::to_string(sort.lo + static_cast<std::int64_t>(k)) + "]");
        return;
      case Sort::Kind::Bool: return;
    }
  }

  Value input(int k, const PortDecl& port) {
    const std::string key = inst(k).name + "." + port.name;
    if (label) {
      auto it = label->inputs.find(key);
      if (it != label->inputs.end()) return it->second;
    }
    const Binding* b = inst(k).find_binding(port.name);
    if (!b) throw std::invalid_argument("input '" + key + "' is not bound");
    Value v = eval(*b->value, -1);
    check_sort(v, port.sort, key);
    return v;
  }

  Value output(int k, const PortDecl& port, const Definition& def) {
    const std::string key = inst(k).name + "." + port.name;
    if (label) {
      auto it = label->outputs.find(key);
      if (it != label->outputs.end()) return it->second;
    }
    Value v = eval(*def.value, k);
    check_sort(v, port.sort, key);
    return v;
  }

  Value member(int k, const NameInfo& info, const std::string& name) {
    const std::string key = inst(k).name + "." + name;
    if (info.kind == NameKind::Control) return stored(key);
    switch (info.port->kind) {
      case PortKind::Local: return stored(key);
      case PortKind::Input: return input(k, *info.port);
      case PortKind::Output:
        if (!info.def) throw std::invalid_argument("output '" + key + "' has no define");
        return output(k, *info.port, *info.def);
    }
    return {};
  }

  Value ref(const Expr& e, int k) {
    if (e.instance) {
      NameInfo info = scope.lookup_member(*e.instance, e.name);
      if (info.kind == NameKind::Unknown) throw std::invalid_argument("unknown port '" + *e.instance + "." + e.name + "'");
      return member(info.instance, info, e.name);
    }
    if (k >= 0) {
      const auto* iface = scope.interface_of(k);
      NameInfo info = scope.lookup_in_behavior(*iface, scope.behavior_of(k), e.name);
      switch (info.kind) {
        case NameKind::Port:
        case NameKind::Control: return member(k, info, e.name);
        case NameKind::Define: return eval(*info.def->value, k);
        case NameKind::Label: return Value::enumeration(e.name);
        default: throw std::invalid_argument("unknown name '" + e.name + "'");
      }
    }
    NameInfo info = scope.lookup_global(e.name);
    switch (info.kind) {
      case NameKind::Env: return stored(e.name);
      case NameKind::Shared: return eval(*info.def->value, -1);
      case NameKind::Label: return Value::enumeration(e.name);
      default: throw std::invalid_argument("unknown name '" + e.name + "'");
    }
  }

  /// Index lower bound of an array-valued expression; literals start at 0.
  std::int64_t array_lo(const Expr& e, int k) {
    switch (e.kind) {
      case Expr::Kind::Ref: {
        if (e.instance) {
          NameInfo info = scope.lookup_member(*e.instance, e.name);
          return info.port ? info.port->sort.lo : 0;
        }
        if (k >= 0) {
          NameInfo info = scope.lookup_in_behavior(*scope.interface_of(k), scope.behavior_of(k), e.name);
          if (info.kind == NameKind::Port) return info.port->sort.lo;
          if (info.kind == NameKind::Define) return array_lo(*info.def->value, k);
          return 0;
        }
        NameInfo info = scope.lookup_global(e.name);
        if (info.kind == NameKind::Env) return info.env->sort.lo;
        if (info.kind == NameKind::Shared) return array_lo(*info.def->value, -1);
        return 0;
      }
      case Expr::Kind::Case: return array_lo(*e.branches.front().value, k);
      default: return 0;
    }
  }

  Value eval(const Expr& e, int k) {
    switch (e.kind) {
      case Expr::Kind::BoolLit: return Value::boolean(e.bool_value);
      case Expr::Kind::IntLit: return Value::integer(e.int_value);
      case Expr::Kind::ArrayLit: {
        std::vector<Value> elems;
        for (const auto& op : e.operands) elems.push_back(eval(*op, k));
        return Value::array(std::move(elems));
      }
      case Expr::Kind::Ref: return ref(e, k);
      case Expr::Kind::Index: {
        Value arr = eval(*e.operands[0], k);
        Value idx = eval(*e.operands[1], k);
        const std::int64_t lo = array_lo(*e.operands[0], k);
        const std::int64_t pos = idx.i - lo;
        if (pos < 0 || pos >= static_cast<std::int64_t>(arr.elements.size()))
          throw EvalError(EvalError::Kind::Range, to_dsl_text(e),
                          "array index " + std::to_string(idx.i) + " out of bounds");
        return arr.elements[static_cast<std::size_t>(pos)];
      }
      case Expr::Kind::Unary: {
        Value v = eval(*e.operands[0], k);
        return e.unary_op == UnaryOp::Not ? Value::boolean(!v.b) : Value::integer(-v.i);
      }
      case Expr::Kind::Binary: return binary(e, k);
      case Expr::Kind::Case:
        for (const auto& br : e.branches)
          if (eval(*br.condition, k).b) return eval(*br.value, k);
        throw EvalError(EvalError::Kind::MissingBranch, to_dsl_text(e), "no case branch is true");
      case Expr::Kind::SetChoice:
        throw EvalError(EvalError::Kind::Choice, to_dsl_text(e), "set choice cannot be evaluated to one value");
    }
    return {};
  }

  static std::string to_dsl_text(const Expr& e) { return to_dsl(e); }

  Value binary(const Expr& e, int k) {
    const BinaryOp op = e.binary_op;
    if (op == BinaryOp::And) {
      if (!eval(*e.operands[0], k).b) return Value::boolean(false);
      return Value::boolean(eval(*e.operands[1], k).b);
    }
    if (op == BinaryOp::Or) {
      if (eval(*e.operands[0], k).b) return Value::boolean(true);
      return Value::boolean(eval(*e.operands[1], k).b);
    }
    Value a = eval(*e.operands[0], k);
    Value b = eval(*e.operands[1], k);
    switch (op) {
      case BinaryOp::Add: return Value::integer(a.i + b.i);
      case BinaryOp::Sub: return Value::integer(a.i - b.i);
      case BinaryOp::Mul: return Value::integer(a.i * b.i);
      case BinaryOp::Mod:
        if (b.i == 0) throw EvalError(EvalError::Kind::Range, to_dsl_text(e), "modulus is zero");
        return Value::integer(a.i % b.i);
      case BinaryOp::Eq: return Value::boolean(a == b);
      case BinaryOp::Ne: return Value::boolean(!(a == b));
      case BinaryOp::Lt: return Value::boolean(a.i < b.i);
      case BinaryOp::Le: return Value::boolean(a.i <= b.i);
      case BinaryOp::Gt: return Value::boolean(a.i > b.i);
      case BinaryOp::Ge: return Value::boolean(a.i >= b.i);
      default: break;
    }
    return {};
  }

  /// All values an init/next expression may take.
  std::vector<Value> choices(const Expr& e, int k) {
    if (e.kind == Expr::Kind::SetChoice) {
      std::vector<Value> out;
      for (const auto& op : e.operands) {
        Value v = eval(*op, k);
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
      }
      return out;
    }
    if (e.kind == Expr::Kind::Case) {
      for (const auto& br : e.branches)
        if (eval(*br.condition, k).b) return choices(*br.value, k);
      throw EvalError(EvalError::Kind::MissingBranch, to_dsl_text(e), "no case branch is true");
    }
    return {eval(e, k)};
  }
};

/// One nondeterministic assignment: a target variable (or element) and the
/// values it may take.
struct ChoicePoint {
  std::string variable;
  std::optional<std::size_t> element;  // position within an array variable
  std::vector<Value> values;
};

std::vector<Valuation> expand(const Valuation& base, const std::vector<ChoicePoint>& points) {
  std::vector<Valuation> out;
  std::vector<std::size_t> pick(points.size(), 0);
  for (const auto& p : points)
    if (p.values.empty()) return out;
  while (true) {
    Valuation v = base;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& p = points[i];
      if (p.element) v[p.variable].elements[*p.element] = p.values[pick[i]];
      else v[p.variable] = p.values[pick[i]];
    }
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
    std::size_t i = points.size();
    while (i > 0) {
      --i;
      if (++pick[i] < points[i].values.size()) break;
      pick[i] = 0;
      if (i == 0) return out;
    }
    if (points.empty()) return out;
  }
}

void check_values(std::vector<Value>& values, const Sort& sort, const std::string& where) {
  for (const auto& v : values) Interp::check_sort(v, sort, where);
}

std::string element_name(const std::string& var, std::int64_t element) {
  return var + "[" + std::to_string(element) + "]";
}

/// Adds the choice points of a list of local assignments of instance `k`.
void local_points(Interp& in, int k, const std::vector<Assignment>& list, std::vector<ChoicePoint>& points) {
  const auto& inst = in.inst(k);
  const auto* iface = in.scope.interface_of(k);
  for (const auto& a : list) {
    const PortDecl* port = iface->find_port(a.port);
    const std::string var = inst.name + "." + a.port;
    ChoicePoint p;
    p.variable = var;
    if (a.element) {
      p.element = static_cast<std::size_t>(*a.element - port->sort.lo);
      p.values = in.choices(*a.value, k);
      check_values(p.values, *port->sort.element, element_name(var, *a.element));
    } else {
      p.values = in.choices(*a.value, k);
      check_values(p.values, port->sort, var);
    }
    points.push_back(std::move(p));
  }
}

}  // namespace

Value eval(const PatternSpec& spec, const Expr& e, const Valuation& state, const StepLabel* label,
           const std::string& instance) {
  Interp in(spec, state, label);
  int k = instance.empty() ? -1 : in.scope.instance_index(instance);
  if (!instance.empty() && k < 0) throw std::invalid_argument("unknown instance '" + instance + "'");
  return in.eval(e, k);
}

bool eval_atom(const PatternSpec& spec, const LtlFormula& atom, const Valuation& state) {
  switch (atom.kind) {
    case LtlFormula::Kind::Atom: return eval(spec, *atom.atom, state, nullptr).b;
    case LtlFormula::Kind::Active: return activation_of(spec, state, atom.instance);
    case LtlFormula::Kind::Connected: return statically_connected(spec, atom.first, atom.second);
    default: throw std::invalid_argument("not an atomic formula");
  }
}

std::vector<Valuation> initial_states(const PatternSpec& spec) {
  Valuation empty;
  Interp in(spec, empty, nullptr);
  Valuation base;
  std::vector<ChoicePoint> points;
  const auto& arch = spec.architecture;
  for (std::size_t k = 0; k < arch.instances.size(); ++k) {
    const auto& inst = arch.instances[k];
    const auto* b = spec.find_behavior(inst.interface);
    const auto* iface = spec.find_interface(inst.interface);
    base[inst.name + "." + kControlState] = Value::enumeration(b->initial_control);
    for (const auto* p : iface->ports_of(PortKind::Local))
      if (p->sort.kind == Sort::Kind::Array)
        base[inst.name + "." + p->name] =
            Value::array(std::vector<Value>(static_cast<std::size_t>(p->sort.length())));
    local_points(in, static_cast<int>(k), b->local_init, points);
  }
  for (const auto& env : arch.env_vars) {
    ChoicePoint p;
    p.variable = env.name;
    p.values = in.choices(*env.init, -1);
    check_values(p.values, env.sort, env.name);
    points.push_back(std::move(p));
  }
  return expand(base, points);
}

std::vector<std::pair<StepLabel, Valuation>> successors(const PatternSpec& spec, const Valuation& s) {
  Interp in(spec, s, nullptr);
  const auto& arch = spec.architecture;

  // Every signal is evaluated, so that evaluation errors surface even in
  // signals no variable depends on.
  StepLabel label;
  for (std::size_t k = 0; k < arch.instances.size(); ++k) {
    const int ki = static_cast<int>(k);
    const auto& inst = arch.instances[k];
    const auto* iface = in.scope.interface_of(ki);
    const auto* b = in.scope.behavior_of(ki);
    for (const auto* p : iface->ports_of(PortKind::Input)) label.inputs[inst.name + "." + p->name] = in.input(ki, *p);
    for (const auto& d : b->defines) {
      const PortDecl* port = iface->find_port(d.name);
      if (port) label.outputs[inst.name + "." + d.name] = in.output(ki, *port, d);
      else in.eval(*d.value, ki);
    }
  }
  for (const auto& d : arch.shared_defs) in.eval(*d.value, -1);

  Interp step(spec, s, &label);
  Valuation base = s;
  std::vector<ChoicePoint> points;
  for (std::size_t k = 0; k < arch.instances.size(); ++k) {
    const int ki = static_cast<int>(k);
    const auto& inst = arch.instances[k];
    const auto* b = step.scope.behavior_of(ki);
    const std::string control_var = inst.name + "." + kControlState;
    const std::string& current = s.at(control_var).label;
    for (const auto& t : b->transitions) {
      if (t.from != current) continue;
      if (step.eval(*t.guard, ki).b) {
        base[control_var] = Value::enumeration(t.to);
        break;
      }
    }
    local_points(step, ki, b->local_updates, points);
  }
  for (const auto& env : arch.env_vars) {
    ChoicePoint p;
    p.variable = env.name;
    p.values = step.choices(*env.next, -1);
    check_values(p.values, env.sort, env.name);
    points.push_back(std::move(p));
  }
  std::vector<std::pair<StepLabel, Valuation>> out;
  for (auto& v : expand(base, points)) out.emplace_back(label, std::move(v));
  return out;
}

}  // namespace reference

Value eval_expr(const PatternSpec& spec, const Expr& e, const GlobalState& state, const StepLabel& label,
                const std::string& instance) {
  StateLayout layout(spec);
  Valuation v = layout.decode(state);
  return reference::eval(spec, e, v, &label, instance);
}

}  // namespace archpat
