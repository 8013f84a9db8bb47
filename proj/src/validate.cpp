#include <algorithm>
#include <cstdint>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

#include "archpat/model.hpp"
#include "scope.hpp"

namespace archpat {

namespace {

using detail::NameInfo;
using detail::NameKind;
using detail::Scope;
using detail::Type;

enum class Mode { Behavior, Global, Property };

enum class Position {
  Plain,   // guards, defines, bindings, atoms
  Init,    // local init: constants, inputs, choice
  Next,    // local update / env next: choice allowed
  EnvInit  // env init: constants and choice only
};

struct Ctx {
  Mode mode = Mode::Global;
  Position position = Position::Plain;
  const InterfaceSpec* iface = nullptr;
  const BehaviorSpec* behavior = nullptr;
  int self_instance = -1;    // binding owner; references to it are rejected
  bool forbid_outputs = false;  // guards
  std::set<std::string>* inputs_seen = nullptr;  // inputs read by init exprs
};

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

class Validator {
 public:
  explicit Validator(const PatternSpec& spec) : spec_(spec), scope_(spec) {}

  std::vector<Diagnostic> run() {
    if (spec_.name.empty()) error(spec_.span, "pattern name is empty", "");
    check_interfaces();
    check_behaviors();
    check_architecture();
    check_properties();
    check_cycles();
    return std::move(out_);
  }

 private:
  const PatternSpec& spec_;
  Scope scope_;
  std::vector<Diagnostic> out_;
  std::map<const Definition*, Type> define_types_;
  std::set<const Definition*> in_progress_;
  // Inputs read by local init expressions, per interface.
  std::map<std::string, std::set<std::string>> init_inputs_;

  void error(const SourceSpan& span, std::string msg, std::string subject) {
    out_.push_back({Severity::Error, std::move(msg), span, std::move(subject)});
  }
  void warn(const SourceSpan& span, std::string msg, std::string subject) {
    out_.push_back({Severity::Warning, std::move(msg), span, std::move(subject)});
  }

  // --- sorts and interfaces ---------------------------------------------

  void check_sort(const Sort& sort, const SourceSpan& span, const std::string& owner) {
    switch (sort.kind) {
      case Sort::Kind::Bool: break;
      case Sort::Kind::Int:
        if (sort.lo > sort.hi) error(span, "empty integer range in sort of '" + owner + "'", owner);
        if (sort.lo < INT32_MIN || sort.hi > INT32_MAX)
          error(span, "integer range of '" + owner + "' exceeds 32 bits", owner);
        break;
      case Sort::Kind::Enum: {
        if (sort.labels.empty()) error(span, "enumeration sort of '" + owner + "' has no labels", owner);
        std::set<std::string> seen;
        for (const auto& l : sort.labels)
          if (!seen.insert(l).second) error(span, "duplicate enumeration label '" + l + "'", l);
        break;
      }
      case Sort::Kind::Array:
        if (sort.lo > sort.hi) error(span, "empty index range in array sort of '" + owner + "'", owner);
        if (!sort.element) {
          error(span, "array sort of '" + owner + "' has no element sort", owner);
        } else if (sort.element->kind != Sort::Kind::Bool && sort.element->kind != Sort::Kind::Int) {
          error(span, "array elements of '" + owner + "' must be bool or an integer range", owner);
        } else {
          check_sort(*sort.element, span, owner);
        }
        break;
    }
  }

  void check_interfaces() {
    std::map<std::string, const InterfaceSpec*> names;
    for (const auto& iface : spec_.interfaces) {
      auto [it, fresh] = names.emplace(lower(iface.name), &iface);
      if (!fresh) {
        if (it->second->name == iface.name)
          error(iface.span, "duplicate interface '" + iface.name + "'", iface.name);
        else
          error(iface.span, "interface '" + iface.name + "' clashes with '" + it->second->name +
                                "' (module names are case-insensitive)", iface.name);
      }
      std::set<std::string> ports;
      for (const auto& port : iface.ports) {
        if (port.name.empty()) error(port.span, "port name is empty", "");
        if (port.name == kControlState)
          error(port.span, "'" + std::string(kControlState) + "' is reserved", port.name);
        if (!ports.insert(port.name).second)
          error(port.span, "duplicate port '" + port.name + "' in interface '" + iface.name + "'", port.name);
        check_sort(port.sort, port.span, port.name);
      }
    }
  }

  // --- expression typing ------------------------------------------------

  Type ref_type(const Expr& e, Ctx& ctx) {
    if (e.instance) return member_type(e, ctx);
    if (ctx.mode == Mode::Behavior) {
      NameInfo info = scope_.lookup_in_behavior(*ctx.iface, ctx.behavior, e.name);
      switch (info.kind) {
        case NameKind::Port: {
          const auto kind = info.port->kind;
          if (ctx.position == Position::Init && kind != PortKind::Input) {
            error(e.span, "initializer may only read input ports, found '" + e.name + "'", e.name);
          } else if (ctx.position == Position::Init && ctx.inputs_seen) {
            ctx.inputs_seen->insert(e.name);
          }
          if (ctx.forbid_outputs && kind == PortKind::Output)
            error(e.span, "transition guard reads output port '" + e.name + "'", e.name);
          return Type::of(info.port->sort);
        }
        case NameKind::Define:
          if (ctx.position == Position::Init) {
            error(e.span, "initializer may not read define '" + e.name + "'", e.name);
            return Type::error();
          }
          if (ctx.forbid_outputs && reads_outputs(*ctx.iface, *ctx.behavior, *info.def))
            error(e.span, "transition guard reads output ports through '" + e.name + "'", e.name);
          return define_type(*info.def, ctx);
        case NameKind::Control:
          if (ctx.position == Position::Init) error(e.span, "initializer may not read the control state", e.name);
          return enum_of(ctx.behavior ? ctx.behavior->control_states : std::vector<std::string>{});
        case NameKind::Label: return label_type(e.name);
        default: break;
      }
      error(e.span, "undeclared name '" + e.name + "'", e.name);
      return Type::error();
    }
    NameInfo info = scope_.lookup_global(e.name);
    switch (info.kind) {
      case NameKind::Env:
        if (ctx.position == Position::EnvInit) {
          error(e.span, "env initializer may not read '" + e.name + "'", e.name);
          return Type::error();
        }
        return Type::of(info.env->sort);
      case NameKind::Shared:
        if (ctx.position == Position::EnvInit) {
          error(e.span, "env initializer may not read '" + e.name + "'", e.name);
          return Type::error();
        }
        return define_type(*info.def, ctx);
      case NameKind::Label: return label_type(e.name);
      default: break;
    }
    error(e.span, "undeclared name '" + e.name + "'", e.name);
    return Type::error();
  }

  Type member_type(const Expr& e, Ctx& ctx) {
    const std::string full = *e.instance + "." + e.name;
    if (ctx.mode == Mode::Behavior) {
      error(e.span, "qualified reference '" + full + "' inside a behavior", full);
      return Type::error();
    }
    if (ctx.position == Position::EnvInit) {
      error(e.span, "env initializer may not read '" + full + "'", full);
      return Type::error();
    }
    int idx = scope_.instance_index(*e.instance);
    if (idx < 0) {
      error(e.span, "undeclared instance '" + *e.instance + "'", *e.instance);
      return Type::error();
    }
    NameInfo info = scope_.lookup_member(*e.instance, e.name);
    if (info.kind == NameKind::Unknown) {
      if (scope_.interface_of(idx)) error(e.span, "undeclared port '" + e.name + "' of instance '" + *e.instance + "'", e.name);
      return Type::error();
    }
    if (ctx.mode == Mode::Global) {
      if (info.kind != NameKind::Port || info.port->kind != PortKind::Output) {
        error(e.span, "wiring may only read output ports, found '" + full + "'", full);
        return Type::error();
      }
      if (idx == ctx.self_instance) {
        error(e.span, "instance '" + *e.instance + "' is wired to its own output '" + e.name + "'", full);
        return Type::error();
      }
    }
    if (info.kind == NameKind::Control) {
      const auto* b = scope_.behavior_of(idx);
      return enum_of(b ? b->control_states : std::vector<std::string>{});
    }
    return Type::of(info.port->sort);
  }

  static Type enum_of(const std::vector<std::string>& labels) {
    Type t;
    t.kind = Type::Kind::Enum;
    t.labels.insert(labels.begin(), labels.end());
    return t;
  }

  static Type label_type(const std::string& label) {
    Type t;
    t.kind = Type::Kind::Enum;
    t.labels.insert(label);
    return t;
  }

  Type define_type(const Definition& def, const Ctx& ctx) {
    if (auto it = define_types_.find(&def); it != define_types_.end()) return it->second;
    if (in_progress_.count(&def)) return Type::error();  // cycle, reported separately
    in_progress_.insert(&def);
    Ctx inner = ctx;
    inner.position = Position::Plain;
    inner.forbid_outputs = false;
    inner.self_instance = -1;
    inner.inputs_seen = nullptr;
    Type t = type_of(*def.value, inner, false);
    in_progress_.erase(&def);
    define_types_[&def] = t;
    return t;
  }

  bool reads_outputs(const InterfaceSpec& iface, const BehaviorSpec& behavior, const Definition& def) {
    std::set<const Definition*> seen;
    std::function<bool(const Expr&)> walk = [&](const Expr& e) -> bool {
      if (e.kind == Expr::Kind::Ref && !e.instance) {
        NameInfo info = scope_.lookup_in_behavior(iface, &behavior, e.name);
        if (info.kind == NameKind::Port && info.port->kind == PortKind::Output) return true;
        if (info.kind == NameKind::Define && seen.insert(info.def).second && walk(*info.def->value)) return true;
      }
      for (const auto& op : e.operands)
        if (op && walk(*op)) return true;
      for (const auto& br : e.branches)
        if (walk(*br.condition) || walk(*br.value)) return true;
      return false;
    };
    seen.insert(&def);
    return walk(*def.value);
  }

  static Type unify(const Type& a, const Type& b, bool& ok) {
    if (!a.ok() || !b.ok()) return Type::error();
    if (a.kind != b.kind) {
      ok = false;
      return Type::error();
    }
    Type t = a;
    switch (a.kind) {
      case Type::Kind::Int:
        t.lo = std::min(a.lo, b.lo);
        t.hi = std::max(a.hi, b.hi);
        break;
      case Type::Kind::Enum: t.labels.insert(b.labels.begin(), b.labels.end()); break;
      case Type::Kind::Array:
        if (a.hi - a.lo != b.hi - b.lo || a.elem_kind != b.elem_kind) {
          ok = false;
          return Type::error();
        }
        t.elem_lo = std::min(a.elem_lo, b.elem_lo);
        t.elem_hi = std::max(a.elem_hi, b.elem_hi);
        break;
      default: break;
    }
    return t;
  }

  Type expect_bool(const Expr& e, Ctx& ctx, const char* what) {
    Type t = type_of(e, ctx, false);
    if (t.ok() && t.kind != Type::Kind::Bool) error(e.span, std::string(what) + " must be boolean, found " + describe(t), "");
    return t;
  }

  static std::pair<std::int64_t, std::int64_t> mul_range(const Type& a, const Type& b) {
    std::int64_t c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
  }

  /// `value_position` is true at the root of init/next expressions and in
  /// case branch values below it: the only places a set choice may appear.
  Type type_of(const Expr& e, Ctx& ctx, bool value_position) {
    switch (e.kind) {
      case Expr::Kind::BoolLit: return Type::boolean();
      case Expr::Kind::IntLit: return Type::integer(e.int_value, e.int_value);
      case Expr::Kind::ArrayLit: {
        if (e.operands.empty()) {
          error(e.span, "empty array literal", "[");
          return Type::error();
        }
        Type elem;
        bool ok = true;
        for (std::size_t i = 0; i < e.operands.size(); ++i) {
          Type t = type_of(*e.operands[i], ctx, false);
          if (t.ok() && t.kind != Type::Kind::Bool && t.kind != Type::Kind::Int) {
            error(e.operands[i]->span, "array elements must be bool or integer", "");
            return Type::error();
          }
          elem = i == 0 ? t : unify(elem, t, ok);
        }
        if (!ok) {
          error(e.span, "array literal mixes element sorts", "[");
          return Type::error();
        }
        if (!elem.ok()) return Type::error();
        Type t;
        t.kind = Type::Kind::Array;
        t.lo = 0;
        t.hi = static_cast<std::int64_t>(e.operands.size()) - 1;
        t.elem_kind = elem.kind;
        t.elem_lo = elem.lo;
        t.elem_hi = elem.hi;
        return t;
      }
      case Expr::Kind::Ref: return ref_type(e, ctx);
      case Expr::Kind::Index: {
        Type arr = type_of(*e.operands[0], ctx, false);
        Type idx = type_of(*e.operands[1], ctx, false);
        if (!arr.ok() || !idx.ok()) return Type::error();
        if (arr.kind != Type::Kind::Array) {
          error(e.span, "indexing a non-array value of sort " + describe(arr), "[");
          return Type::error();
        }
        if (idx.kind != Type::Kind::Int) {
          error(e.operands[1]->span, "array index must be an integer", "");
          return Type::error();
        }
        if (idx.lo < arr.lo || idx.hi > arr.hi)
          warn(e.span, "index range " + std::to_string(idx.lo) + ".." + std::to_string(idx.hi) +
                           " may leave array bounds " + std::to_string(arr.lo) + ".." + std::to_string(arr.hi), "[");
        return arr.element();
      }
      case Expr::Kind::Unary: {
        Type t = type_of(*e.operands[0], ctx, false);
        if (!t.ok()) return t;
        if (e.unary_op == UnaryOp::Not) {
          if (t.kind != Type::Kind::Bool) {
            error(e.span, "'!' needs a boolean operand", "!");
            return Type::error();
          }
          return t;
        }
        if (t.kind != Type::Kind::Int) {
          error(e.span, "unary '-' needs an integer operand", "-");
          return Type::error();
        }
        return Type::integer(-t.hi, -t.lo);
      }
      case Expr::Kind::Binary: return binary_type(e, ctx);
      case Expr::Kind::Case: {
        if (e.branches.empty()) {
          error(e.span, "case without branches", "case");
          return Type::error();
        }
        Type result;
        bool ok = true;
        for (std::size_t i = 0; i < e.branches.size(); ++i) {
          expect_bool(*e.branches[i].condition, ctx, "case condition");
          Type v = type_of(*e.branches[i].value, ctx, value_position);
          result = i == 0 ? v : unify(result, v, ok);
          if (!ok) {
            error(e.branches[i].value->span, "case branch values have different sorts", "");
            return Type::error();
          }
        }
        return result;
      }
      case Expr::Kind::SetChoice: {
        const bool allowed = value_position && ctx.position != Position::Plain;
        if (!allowed) error(e.span, "set choice is only allowed in init and next assignments", "{");
        if (e.operands.empty()) {
          error(e.span, "empty set choice", "{");
          return Type::error();
        }
        Type result;
        bool ok = true;
        for (std::size_t i = 0; i < e.operands.size(); ++i) {
          const auto& v = *e.operands[i];
          const bool label = v.kind == Expr::Kind::Ref && !v.instance && scope_.is_label(v.name);
          if (!is_constant(v) && !label) error(v.span, "set choice values must be constants", "");
          Type t = type_of(v, ctx, false);
          if (t.kind == Type::Kind::Array) error(v.span, "set choice values must be scalar", "");
          result = i == 0 ? t : unify(result, t, ok);
        }
        if (!ok) {
          error(e.span, "set choice mixes sorts", "{");
          return Type::error();
        }
        return result;
      }
    }
    return Type::error();
  }

  Type binary_type(const Expr& e, Ctx& ctx) {
    Type a = type_of(*e.operands[0], ctx, false);
    Type b = type_of(*e.operands[1], ctx, false);
    if (!a.ok() || !b.ok()) return Type::error();
    const std::string op = to_string(e.binary_op);
    auto need_int = [&]() {
      if (a.kind != Type::Kind::Int || b.kind != Type::Kind::Int) {
        error(e.span, "operator '" + op + "' needs integer operands", op);
        return false;
      }
      return true;
    };
    switch (e.binary_op) {
      case BinaryOp::Add:
        if (!need_int()) return Type::error();
        return Type::integer(a.lo + b.lo, a.hi + b.hi);
      case BinaryOp::Sub:
        if (!need_int()) return Type::error();
        return Type::integer(a.lo - b.hi, a.hi - b.lo);
      case BinaryOp::Mul: {
        if (!need_int()) return Type::error();
        auto [lo, hi] = mul_range(a, b);
        return Type::integer(lo, hi);
      }
      case BinaryOp::Mod: {
        if (!need_int()) return Type::error();
        if (b.lo <= 0 && b.hi >= 0) warn(e.span, "modulus may be zero", op);
        std::int64_t m = std::max(std::abs(b.lo), std::abs(b.hi)) - 1;
        if (m < 0) m = 0;
        if (a.lo >= 0) return Type::integer(0, std::min(a.hi, m));
        if (a.hi <= 0) return Type::integer(std::max(a.lo, -m), 0);
        return Type::integer(-m, m);
      }
      case BinaryOp::Lt:
      case BinaryOp::Le:
      case BinaryOp::Gt:
      case BinaryOp::Ge:
        if (!need_int()) return Type::error();
        return Type::boolean();
      case BinaryOp::Eq:
      case BinaryOp::Ne: {
        bool ok = true;
        unify(a, b, ok);
        if (!ok) {
          error(e.span, "cannot compare " + describe(a) + " with " + describe(b), op);
          return Type::error();
        }
        return Type::boolean();
      }
      case BinaryOp::And:
      case BinaryOp::Or:
        if (a.kind != Type::Kind::Bool || b.kind != Type::Kind::Bool) {
          error(e.span, "operator '" + op + "' needs boolean operands", op);
          return Type::error();
        }
        return Type::boolean();
    }
    return Type::error();
  }

  // Arithmetic (+, -, *) results flowing straight into stored state must fit
  // the target sort; otherwise the step would fail at check time.
  void check_arith_range(const Expr& e, const Sort& target, const std::string& name, Ctx& ctx) {
    switch (e.kind) {
      case Expr::Kind::Case:
        for (const auto& br : e.branches) check_arith_range(*br.value, target, name, ctx);
        return;
      case Expr::Kind::ArrayLit:
        if (target.kind == Sort::Kind::Array && target.element)
          for (const auto& el : e.operands) check_arith_range(*el, *target.element, name, ctx);
        return;
      case Expr::Kind::Binary:
        if (e.binary_op == BinaryOp::Add || e.binary_op == BinaryOp::Sub || e.binary_op == BinaryOp::Mul) {
          // Re-typing is silent: diagnostics for this expression were already emitted.
          std::vector<Diagnostic> saved;
          saved.swap(out_);
          Ctx quiet = ctx;
          quiet.inputs_seen = nullptr;
          Type t = type_of(e, quiet, false);
          out_.swap(saved);
          if (t.kind == Type::Kind::Int && target.kind == Sort::Kind::Int && (t.lo < target.lo || t.hi > target.hi))
            warn(e.span, "arithmetic result range " + std::to_string(t.lo) + ".." + std::to_string(t.hi) +
                             " exceeds sort " + to_string(target) + " of '" + name + "'", name);
        }
        return;
      default: return;
    }
  }

  void check_assigned(const Expr& value, const Sort& target, const std::string& name, Ctx& ctx) {
    Type t = type_of(value, ctx, true);
    if (t.ok() && !detail::assignable(t, target))
      error(value.span, "value of sort " + describe(t) + " cannot be assigned to '" + name + "' of sort " + to_string(target), name);
    if (t.ok()) check_arith_range(value, target, name, ctx);
  }

  // --- behaviors --------------------------------------------------------

  void check_assignment_set(const BehaviorSpec& b, const InterfaceSpec& iface, const std::vector<Assignment>& list,
                            bool is_init, Ctx& ctx) {
    std::map<std::string, std::pair<int, std::set<std::int64_t>>> seen;  // whole count, elements
    for (const auto& a : list) {
      const PortDecl* port = iface.find_port(a.port);
      if (!port) {
        error(a.span, "undeclared port '" + a.port + "'", a.port);
        continue;
      }
      if (port->kind != PortKind::Local) {
        error(a.span, std::string(is_init ? "init" : "next") + " assigns non-local port '" + a.port + "'", a.port);
        continue;
      }
      auto& entry = seen[a.port];
      const Sort* target = &port->sort;
      if (a.element) {
        if (port->sort.kind != Sort::Kind::Array) {
          error(a.span, "element assignment to non-array port '" + a.port + "'", a.port);
          continue;
        }
        if (*a.element < port->sort.lo || *a.element > port->sort.hi) {
          error(a.span, "element index " + std::to_string(*a.element) + " outside " + a.port + "'s index range", a.port);
          continue;
        }
        if (!entry.second.insert(*a.element).second)
          error(a.span, "element " + a.port + "[" + std::to_string(*a.element) + "] assigned twice", a.port);
        target = port->sort.element.get();
      } else if (++entry.first > 1) {
        error(a.span, "port '" + a.port + "' has more than one " + (is_init ? "init" : "next") + " assignment", a.port);
      }
      if (entry.first > 0 && !entry.second.empty())
        error(a.span, "port '" + a.port + "' mixes whole and element assignments", a.port);
      check_assigned(*a.value, *target, a.port, ctx);
    }
    if (!is_init) return;
    for (const auto* port : iface.ports_of(PortKind::Local)) {
      auto it = seen.find(port->name);
      bool complete = it != seen.end() &&
                      (it->second.first == 1 ||
                       (port->sort.kind == Sort::Kind::Array &&
                        static_cast<std::int64_t>(it->second.second.size()) == port->sort.length()));
      if (!complete) error(b.span, "local port '" + port->name + "' has no complete init", port->name);
    }
  }

  void check_behaviors() {
    std::set<std::string> seen;
    for (const auto& b : spec_.behaviors) {
      const InterfaceSpec* iface = spec_.find_interface(b.interface);
      if (!iface) {
        error(b.span, "behavior for undeclared interface '" + b.interface + "'", b.interface);
        continue;
      }
      if (!seen.insert(b.interface).second) error(b.span, "duplicate behavior for '" + b.interface + "'", b.interface);
      if (b.control_states.empty()) error(b.span, "behavior '" + b.interface + "' has no control states", b.interface);
      std::set<std::string> states;
      for (const auto& s : b.control_states) {
        if (!states.insert(s).second) error(b.span, "duplicate control state '" + s + "'", s);
        if (iface->find_port(s)) error(b.span, "control state '" + s + "' shadows a port", s);
      }
      if (!states.count(b.initial_control))
        error(b.span, "initial control state '" + b.initial_control + "' is not declared", b.initial_control);

      Ctx ctx;
      ctx.mode = Mode::Behavior;
      ctx.iface = iface;
      ctx.behavior = &b;

      for (const auto& t : b.transitions) {
        if (!states.count(t.from)) error(t.span, "undeclared control state '" + t.from + "'", t.from);
        if (!states.count(t.to)) error(t.span, "undeclared control state '" + t.to + "'", t.to);
        Ctx g = ctx;
        g.forbid_outputs = true;
        expect_bool(*t.guard, g, "transition guard");
      }

      Ctx init = ctx;
      init.position = Position::Init;
      init.inputs_seen = &init_inputs_[iface->name];
      check_assignment_set(b, *iface, b.local_init, true, init);
      Ctx next = ctx;
      next.position = Position::Next;
      check_assignment_set(b, *iface, b.local_updates, false, next);

      std::set<std::string> defined;
      for (const auto& d : b.defines) {
        if (!defined.insert(d.name).second) {
          error(d.span, "duplicate define '" + d.name + "'", d.name);
          continue;
        }
        const PortDecl* port = iface->find_port(d.name);
        if (port && port->kind != PortKind::Output) {
          error(d.span, "define '" + d.name + "' shadows a " + to_string(port->kind) + " port", d.name);
          continue;
        }
        if (d.name == kControlState || states.count(d.name)) {
          error(d.span, "define '" + d.name + "' shadows a control state", d.name);
          continue;
        }
        Type t = define_type(d, ctx);
        if (port && t.ok() && !detail::assignable(t, port->sort))
          error(d.span, "output '" + d.name + "' defined with sort " + describe(t) + ", declared " + to_string(port->sort), d.name);
      }
      for (const auto* port : iface->ports_of(PortKind::Output))
        if (!defined.count(port->name)) error(b.span, "output port '" + port->name + "' has no define", port->name);
    }
  }

  // --- architecture -----------------------------------------------------

  void check_architecture() {
    const auto& arch = spec_.architecture;
    std::set<std::string> names;
    auto claim = [&](const std::string& n, const SourceSpan& span, const char* what) {
      if (!names.insert(n).second) error(span, std::string("duplicate ") + what + " name '" + n + "'", n);
    };
    for (const auto& inst : arch.instances) claim(inst.name, inst.span, "instance");
    for (const auto& env : arch.env_vars) claim(env.name, env.span, "env");
    for (const auto& def : arch.shared_defs) claim(def.name, def.span, "define");

    for (std::size_t i = 0; i < arch.instances.size(); ++i) {
      const auto& inst = arch.instances[i];
      const InterfaceSpec* iface = spec_.find_interface(inst.interface);
      if (!iface) {
        error(inst.span, "instance '" + inst.name + "' of undeclared interface '" + inst.interface + "'", inst.interface);
        continue;
      }
      if (!spec_.find_behavior(inst.interface))
        error(inst.span, "interface '" + inst.interface + "' of instance '" + inst.name + "' has no behavior", inst.interface);
      std::set<std::string> bound;
      for (const auto& bnd : inst.bindings) {
        const PortDecl* port = iface->find_port(bnd.port);
        if (!port) {
          error(bnd.span, "undeclared port '" + bnd.port + "' bound on instance '" + inst.name + "'", bnd.port);
          continue;
        }
        if (port->kind != PortKind::Input) {
          error(bnd.span, "binding to non-input port '" + bnd.port + "'", bnd.port);
          continue;
        }
        if (!bound.insert(bnd.port).second) {
          error(bnd.span, "input port '" + bnd.port + "' of '" + inst.name + "' bound twice", bnd.port);
          continue;
        }
        Ctx ctx;
        ctx.mode = Mode::Global;
        ctx.self_instance = static_cast<int>(i);
        Type t = type_of(*bnd.value, ctx, false);
        if (t.ok() && !detail::assignable(t, port->sort))
          error(bnd.value->span, "binding of sort " + describe(t) + " does not fit input '" + bnd.port + "' of sort " +
                                     to_string(port->sort), bnd.port);
        if (init_inputs_[iface->name].count(bnd.port) && !is_constant(*bnd.value))
          error(bnd.value->span, "input '" + bnd.port + "' is read by an initializer and must be bound to a constant",
                bnd.port);
      }
      for (const auto* port : iface->ports_of(PortKind::Input))
        if (!bound.count(port->name))
          error(inst.span, "input port '" + port->name + "' of instance '" + inst.name + "' is not bound", port->name);
    }

    for (const auto& env : arch.env_vars) {
      check_sort(env.sort, env.span, env.name);
      Ctx init;
      init.mode = Mode::Global;
      init.position = Position::EnvInit;
      check_assigned(*env.init, env.sort, env.name, init);
      Ctx next;
      next.mode = Mode::Global;
      next.position = Position::Next;
      check_assigned(*env.next, env.sort, env.name, next);
    }
    for (const auto& def : arch.shared_defs) {
      Ctx ctx;
      ctx.mode = Mode::Global;
      define_type(def, ctx);
    }
  }

  // --- properties -------------------------------------------------------

  void check_ltl(const LtlFormula& f) {
    switch (f.kind) {
      case LtlFormula::Kind::Atom: {
        Ctx ctx;
        ctx.mode = Mode::Property;
        expect_bool(*f.atom, ctx, "property atom");
        return;
      }
      case LtlFormula::Kind::Active:
        if (scope_.instance_index(f.instance) < 0) error(f.span, "undeclared instance '" + f.instance + "'", f.instance);
        return;
      case LtlFormula::Kind::Connected:
        for (const auto* p : {&f.first, &f.second}) {
          NameInfo info = scope_.lookup_member(p->instance, p->port);
          if (info.kind != NameKind::Port)
            error(f.span, "undeclared port '" + p->instance + "." + p->port + "'", p->port);
        }
        return;
      default:
        for (const auto& op : f.operands) check_ltl(*op);
    }
  }

  void check_properties() {
    std::set<std::string> names;
    for (const auto& p : spec_.properties) {
      if (!names.insert(p.name).second) error(p.span, "duplicate property '" + p.name + "'", p.name);
      if (p.formula) check_ltl(*p.formula);
    }
  }

  // --- combinational cycles ---------------------------------------------

  struct Graph {
    std::vector<std::string> names;
    std::vector<SourceSpan> spans;
    std::vector<char> interesting;  // input or shared node
    std::vector<std::vector<int>> edges;
    std::unordered_map<std::string, int> ids;

    int node(const std::string& n, const SourceSpan& span = {}, bool mark = false) {
      auto [it, fresh] = ids.emplace(n, static_cast<int>(names.size()));
      if (fresh) {
        names.push_back(n);
        spans.push_back(span);
        interesting.push_back(mark);
        edges.emplace_back();
      } else if (span.known() && !spans[it->second].known()) {
        spans[it->second] = span;
      }
      return it->second;
    }

    void edge(int from, int to) { edges[from].push_back(to); }
  };

  static void collect_refs(const Expr& e, std::vector<const Expr*>& refs) {
    if (e.kind == Expr::Kind::Ref) refs.push_back(&e);
    for (const auto& op : e.operands)
      if (op) collect_refs(*op, refs);
    for (const auto& br : e.branches) {
      collect_refs(*br.condition, refs);
      collect_refs(*br.value, refs);
    }
  }

  // Tarjan; returns SCCs that contain a cycle.
  static std::vector<std::vector<int>> cyclic_components(const Graph& g) {
    const int n = static_cast<int>(g.names.size());
    std::vector<int> index(n, -1), low(n, 0), stack;
    std::vector<char> on_stack(n, 0);
    std::vector<std::vector<int>> out;
    int counter = 0;
    std::function<void(int)> visit = [&](int v) {
      index[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack[v] = 1;
      for (int w : g.edges[v]) {
        if (index[w] < 0) {
          visit(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      }
      if (low[v] == index[v]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
        } while (w != v);
        bool self = comp.size() == 1 &&
                    std::find(g.edges[v].begin(), g.edges[v].end(), v) != g.edges[v].end();
        if (comp.size() > 1 || self) out.push_back(std::move(comp));
      }
    };
    for (int v = 0; v < n; ++v)
      if (index[v] < 0) visit(v);
    return out;
  }

  void report_cycle(const Graph& g, const std::vector<int>& comp, const std::string& where) {
    std::vector<std::string> members;
    SourceSpan span;
    for (int v : comp) {
      members.push_back(g.names[v]);
      if (!span.known()) span = g.spans[v];
    }
    std::sort(members.begin(), members.end());
    std::string list;
    for (const auto& m : members) list += (list.empty() ? "" : ", ") + m;
    error(span, "combinational cycle" + where + " through {" + list + "}", members.front());
  }

  void check_cycles() {
    // Module-internal define cycles, once per behavior.
    for (const auto& b : spec_.behaviors) {
      const InterfaceSpec* iface = spec_.find_interface(b.interface);
      if (!iface) continue;
      Graph g;
      for (const auto& d : b.defines) g.node(d.name, d.span);
      for (const auto& d : b.defines) {
        std::vector<const Expr*> refs;
        collect_refs(*d.value, refs);
        int from = g.node(d.name);
        for (const auto* r : refs) {
          if (r->instance) continue;
          for (const auto& other : b.defines)
            if (other.name == r->name) g.edge(from, g.node(other.name));
        }
      }
      for (const auto& comp : cyclic_components(g)) report_cycle(g, comp, " in behavior '" + b.interface + "'");
    }

    // Architecture level: instance inputs, instance defines, shared defines.
    Graph g;
    const auto& arch = spec_.architecture;
    for (const auto& def : arch.shared_defs) g.node(def.name, def.span, true);
    for (std::size_t i = 0; i < arch.instances.size(); ++i) {
      const auto& inst = arch.instances[i];
      const auto* iface = spec_.find_interface(inst.interface);
      const auto* beh = spec_.find_behavior(inst.interface);
      if (!iface || !beh) continue;
      for (const auto& d : beh->defines) {
        int from = g.node(inst.name + "." + d.name, d.span);
        std::vector<const Expr*> refs;
        collect_refs(*d.value, refs);
        for (const auto* r : refs) {
          if (r->instance) continue;
          NameInfo info = scope_.lookup_in_behavior(*iface, beh, r->name);
          bool is_input = info.kind == NameKind::Port && info.port->kind == PortKind::Input;
          bool is_def = info.kind == NameKind::Define || (info.kind == NameKind::Port && info.port->kind == PortKind::Output);
          if (is_input) g.edge(from, g.node(inst.name + "." + r->name, {}, true));
          else if (is_def) g.edge(from, g.node(inst.name + "." + r->name));
        }
      }
      for (const auto& bnd : inst.bindings) {
        int from = g.node(inst.name + "." + bnd.port, bnd.span, true);
        g.interesting[from] = 1;
        std::vector<const Expr*> refs;
        collect_refs(*bnd.value, refs);
        for (const auto* r : refs) {
          if (r->instance) g.edge(from, g.node(*r->instance + "." + r->name));
          else if (scope_.lookup_global(r->name).kind == NameKind::Shared) g.edge(from, g.node(r->name, {}, true));
        }
      }
    }
    for (const auto& def : arch.shared_defs) {
      int from = g.node(def.name);
      std::vector<const Expr*> refs;
      collect_refs(*def.value, refs);
      for (const auto* r : refs) {
        if (r->instance) g.edge(from, g.node(*r->instance + "." + r->name));
        else if (scope_.lookup_global(r->name).kind == NameKind::Shared) g.edge(from, g.node(r->name, {}, true));
      }
    }
    for (const auto& comp : cyclic_components(g)) {
      bool crosses = std::any_of(comp.begin(), comp.end(), [&](int v) { return g.interesting[v] != 0; });
      if (crosses) report_cycle(g, comp, "");
    }
  }
};

}  // namespace

std::vector<Diagnostic> validate_spec(const PatternSpec& spec) { return Validator(spec).run(); }

}  // namespace archpat
