#include <functional>
#include <set>

#include "archpat/semantics.hpp"
#include "scope.hpp"

namespace archpat {

Value Value::boolean(bool v) {
  Value x;
  x.kind = Kind::Bool;
  x.b = v;
  return x;
}

Value Value::integer(std::int64_t v) {
  Value x;
  x.kind = Kind::Int;
  x.i = v;
  return x;
}

Value Value::enumeration(std::string label) {
  Value x;
  x.kind = Kind::Enum;
  x.label = std::move(label);
  return x;
}

Value Value::array(std::vector<Value> elements) {
  Value x;
  x.kind = Kind::Array;
  x.elements = std::move(elements);
  return x;
}

bool operator==(const Value& a, const Value& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Value::Kind::Bool: return a.b == b.b;
    case Value::Kind::Int: return a.i == b.i;
    case Value::Kind::Enum: return a.label == b.label;
    case Value::Kind::Array: return a.elements == b.elements;
  }
  return false;
}

bool operator<(const Value& a, const Value& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  switch (a.kind) {
    case Value::Kind::Bool: return a.b < b.b;
    case Value::Kind::Int: return a.i < b.i;
    case Value::Kind::Enum: return a.label < b.label;
    case Value::Kind::Array: return a.elements < b.elements;
  }
  return false;
}

std::string to_string(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Bool: return v.b ? "true" : "false";
    case Value::Kind::Int: return std::to_string(v.i);
    case Value::Kind::Enum: return v.label;
    case Value::Kind::Array: {
      std::string out = "[";
      for (std::size_t k = 0; k < v.elements.size(); ++k) out += (k ? ", " : "") + to_string(v.elements[k]);
      return out + "]";
    }
  }
  return "?";
}

const char* to_string(EvalError::Kind kind) {
  switch (kind) {
    case EvalError::Kind::Range: return "range error";
    case EvalError::Kind::MissingBranch: return "missing case branch";
    case EvalError::Kind::Choice: return "set choice outside init/next";
  }
  return "?";
}

std::size_t GlobalStateHash::operator()(const GlobalState& s) const noexcept {
  // FNV-1a over the slot bytes, folded to size_t.
  std::uint64_t h = 1469598103934665603ull;
  for (std::int32_t v : s.slots) {
    auto u = static_cast<std::uint32_t>(v);
    for (int k = 0; k < 4; ++k) {
      h ^= (u >> (8 * k)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return static_cast<std::size_t>(h ^ (h >> 32));
}

// --- StateLayout ------------------------------------------------------------

StateLayout::StateLayout(const PatternSpec& spec) {
  auto intern = [&](const std::string& l) {
    if (label_ids_.emplace(l, static_cast<std::int32_t>(labels_.size())).second) labels_.push_back(l);
  };
  for (const auto& iface : spec.interfaces)
    for (const auto& p : iface.ports)
      if (p.sort.kind == Sort::Kind::Enum)
        for (const auto& l : p.sort.labels) intern(l);
  for (const auto& b : spec.behaviors)
    for (const auto& s : b.control_states) intern(s);
  for (const auto& e : spec.architecture.env_vars)
    if (e.sort.kind == Sort::Kind::Enum)
      for (const auto& l : e.sort.labels) intern(l);

  std::size_t slot = 0;
  const auto& arch = spec.architecture;
  for (std::size_t k = 0; k < arch.instances.size(); ++k) {
    const auto& inst = arch.instances[k];
    const auto* behavior = spec.find_behavior(inst.interface);
    const auto* iface = spec.find_interface(inst.interface);
    Variable control;
    control.name = inst.name + "." + kControlState;
    control.sort = Sort::enumeration(behavior ? behavior->control_states : std::vector<std::string>{});
    control.first_slot = slot++;
    control.instance = static_cast<int>(k);
    control.control = true;
    vars_.push_back(control);
    if (!iface) continue;
    for (const auto* p : iface->ports_of(PortKind::Local)) {
      Variable v;
      v.name = inst.name + "." + p->name;
      v.sort = p->sort;
      v.first_slot = slot;
      v.instance = static_cast<int>(k);
      slot += static_cast<std::size_t>(p->sort.length());
      vars_.push_back(std::move(v));
    }
  }
  for (const auto& e : arch.env_vars) {
    Variable v;
    v.name = e.name;
    v.sort = e.sort;
    v.first_slot = slot;
    slot += static_cast<std::size_t>(e.sort.length());
    vars_.push_back(std::move(v));
  }
  slot_count_ = slot;
  for (const auto& v : vars_) names_.push_back(v.name);
}

std::int32_t StateLayout::label_id(const std::string& label) const {
  auto it = label_ids_.find(label);
  return it == label_ids_.end() ? -1 : it->second;
}

const std::string& StateLayout::label_name(std::int32_t id) const {
  static const std::string unknown = "<invalid>";
  if (id < 0 || static_cast<std::size_t>(id) >= labels_.size()) return unknown;
  return labels_[static_cast<std::size_t>(id)];
}

const StateLayout::Variable* StateLayout::find(const std::string& name) const {
  for (const auto& v : vars_)
    if (v.name == name) return &v;
  return nullptr;
}

namespace {

Value decode_scalar(const StateLayout& layout, const Sort& sort, std::int32_t raw) {
  switch (sort.kind) {
    case Sort::Kind::Bool: return Value::boolean(raw != 0);
    case Sort::Kind::Enum: return Value::enumeration(layout.label_name(raw));
    default: return Value::integer(raw);
  }
}

std::int32_t encode_scalar(const StateLayout& layout, const Sort& sort, const Value& v, const std::string& name) {
  auto bad = [&]() -> std::invalid_argument {
    return std::invalid_argument("value " + to_string(v) + " of '" + name + "' is not in sort " + to_string(sort));
  };
  switch (sort.kind) {
    case Sort::Kind::Bool:
      if (v.kind != Value::Kind::Bool) throw bad();
      return v.b ? 1 : 0;
    case Sort::Kind::Int:
      if (v.kind != Value::Kind::Int || v.i < sort.lo || v.i > sort.hi) throw bad();
      return static_cast<std::int32_t>(v.i);
    case Sort::Kind::Enum: {
      if (v.kind != Value::Kind::Enum) throw bad();
      bool member = false;
      for (const auto& l : sort.labels) member = member || l == v.label;
      if (!member) throw bad();
      return layout.label_id(v.label);
    }
    case Sort::Kind::Array: break;
  }
  throw bad();
}

}  // namespace

Valuation StateLayout::decode(const GlobalState& s) const {
  Valuation out;
  for (const auto& v : vars_) {
    if (v.sort.kind == Sort::Kind::Array) {
      std::vector<Value> elems;
      for (std::int64_t k = 0; k < v.sort.length(); ++k)
        elems.push_back(decode_scalar(*this, *v.sort.element, s.slots.at(v.first_slot + static_cast<std::size_t>(k))));
      out.emplace(v.name, Value::array(std::move(elems)));
    } else {
      out.emplace(v.name, decode_scalar(*this, v.sort, s.slots.at(v.first_slot)));
    }
  }
  return out;
}

GlobalState StateLayout::encode(const Valuation& val) const {
  GlobalState s;
  s.slots.assign(slot_count_, 0);
  for (const auto& [name, value] : val)
    if (!find(name)) throw std::invalid_argument("unknown state variable '" + name + "'");
  for (const auto& v : vars_) {
    auto it = val.find(v.name);
    if (it == val.end()) throw std::invalid_argument("state variable '" + v.name + "' is missing");
    if (v.sort.kind == Sort::Kind::Array) {
      if (it->second.kind != Value::Kind::Array || static_cast<std::int64_t>(it->second.elements.size()) != v.sort.length())
        throw std::invalid_argument("value of '" + v.name + "' is not an array of length " +
                                    std::to_string(v.sort.length()));
      for (std::size_t k = 0; k < it->second.elements.size(); ++k)
        s.slots[v.first_slot + k] = encode_scalar(*this, *v.sort.element, it->second.elements[k], v.name);
    } else {
      s.slots[v.first_slot] = encode_scalar(*this, v.sort, it->second, v.name);
    }
  }
  return s;
}

// --- static predicates ------------------------------------------------------

bool statically_connected(const PatternSpec& spec, const PortPath& a, const PortPath& b) {
  detail::Scope scope(spec);
  auto reads = [&](const PortPath& input, const PortPath& target) {
    const Instance* inst = spec.architecture.find_instance(input.instance);
    if (!inst) return false;
    const Binding* bnd = inst->find_binding(input.port);
    if (!bnd) return false;
    std::set<std::string> seen;
    std::function<bool(const Expr&)> walk = [&](const Expr& e) -> bool {
      if (e.kind == Expr::Kind::Ref) {
        if (e.instance) {
          if (*e.instance == target.instance && e.name == target.port) return true;
        } else {
          auto info = scope.lookup_global(e.name);
          if (info.kind == detail::NameKind::Shared && seen.insert(e.name).second && walk(*info.def->value))
            return true;
        }
      }
      for (const auto& op : e.operands)
        if (op && walk(*op)) return true;
      for (const auto& br : e.branches)
        if (walk(*br.condition) || walk(*br.value)) return true;
      return false;
    };
    return walk(*bnd->value);
  };
  return reads(a, b) || reads(b, a);
}

bool activation_of(const PatternSpec& spec, const Valuation& state, const std::string& instance) {
  const Instance* inst = spec.architecture.find_instance(instance);
  if (!inst) return false;
  const InterfaceSpec* iface = spec.find_interface(inst->interface);
  if (!iface) return false;
  const PortDecl* flag = iface->find_port(kActivationFlag);
  if (!flag || flag->kind != PortKind::Local || flag->sort.kind != Sort::Kind::Bool) return true;
  auto it = state.find(instance + "." + kActivationFlag);
  return it != state.end() && it->second.b;
}

}  // namespace archpat
