#include "scope.hpp"

namespace archpat::detail {

Scope::Scope(const PatternSpec& spec) : spec_(&spec) {
  const auto& arch = spec.architecture;
  for (std::size_t i = 0; i < arch.instances.size(); ++i) instances_.emplace(arch.instances[i].name, static_cast<int>(i));
  for (std::size_t i = 0; i < arch.env_vars.size(); ++i) env_.emplace(arch.env_vars[i].name, static_cast<int>(i));
  for (std::size_t i = 0; i < arch.shared_defs.size(); ++i) shared_.emplace(arch.shared_defs[i].name, static_cast<int>(i));
  for (const auto& iface : spec.interfaces)
    for (const auto& port : iface.ports)
      if (port.sort.kind == Sort::Kind::Enum) labels_.insert(port.sort.labels.begin(), port.sort.labels.end());
  for (const auto& env : arch.env_vars)
    if (env.sort.kind == Sort::Kind::Enum) labels_.insert(env.sort.labels.begin(), env.sort.labels.end());
  for (const auto& b : spec.behaviors) labels_.insert(b.control_states.begin(), b.control_states.end());
}

NameInfo Scope::lookup_in_behavior(const InterfaceSpec& iface, const BehaviorSpec* behavior,
                                   const std::string& name) const {
  NameInfo info;
  if (behavior) {
    for (std::size_t i = 0; i < behavior->defines.size(); ++i) {
      const auto& d = behavior->defines[i];
      if (d.name != name) continue;
      // An output port's define is reported as the port itself.
      if (const auto* p = iface.find_port(name); p && p->kind == PortKind::Output) break;
      info.kind = NameKind::Define;
      info.def = &d;
      info.define_index = static_cast<int>(i);
      return info;
    }
  }
  if (const auto* p = iface.find_port(name)) {
    info.kind = NameKind::Port;
    info.port = p;
    if (behavior) {
      for (std::size_t i = 0; i < behavior->defines.size(); ++i)
        if (behavior->defines[i].name == name) {
          info.def = &behavior->defines[i];
          info.define_index = static_cast<int>(i);
        }
    }
    return info;
  }
  if (name == kControlState) {
    info.kind = NameKind::Control;
    return info;
  }
  if (is_label(name)) info.kind = NameKind::Label;
  return info;
}

NameInfo Scope::lookup_global(const std::string& name) const {
  NameInfo info;
  if (auto it = env_.find(name); it != env_.end()) {
    info.kind = NameKind::Env;
    info.env = &spec_->architecture.env_vars[it->second];
    info.env_index = it->second;
    return info;
  }
  if (auto it = shared_.find(name); it != shared_.end()) {
    info.kind = NameKind::Shared;
    info.def = &spec_->architecture.shared_defs[it->second];
    info.define_index = it->second;
    return info;
  }
  if (is_label(name)) info.kind = NameKind::Label;
  return info;
}

NameInfo Scope::lookup_member(const std::string& instance, const std::string& name) const {
  NameInfo info;
  int idx = instance_index(instance);
  if (idx < 0) return info;
  info.instance = idx;
  const auto* iface = interface_of(idx);
  if (!iface) return info;
  if (const auto* p = iface->find_port(name)) {
    info.kind = NameKind::Port;
    info.port = p;
    if (const auto* b = behavior_of(idx)) {
      for (std::size_t i = 0; i < b->defines.size(); ++i)
        if (b->defines[i].name == name) {
          info.def = &b->defines[i];
          info.define_index = static_cast<int>(i);
        }
    }
    return info;
  }
  if (name == kControlState) info.kind = NameKind::Control;
  return info;
}

int Scope::instance_index(const std::string& name) const {
  auto it = instances_.find(name);
  return it == instances_.end() ? -1 : it->second;
}

const InterfaceSpec* Scope::interface_of(int instance) const {
  if (instance < 0 || instance >= static_cast<int>(spec_->architecture.instances.size())) return nullptr;
  return spec_->find_interface(spec_->architecture.instances[instance].interface);
}

const BehaviorSpec* Scope::behavior_of(int instance) const {
  if (instance < 0 || instance >= static_cast<int>(spec_->architecture.instances.size())) return nullptr;
  return spec_->find_behavior(spec_->architecture.instances[instance].interface);
}

// --- Type -----------------------------------------------------------------

Type Type::of(const Sort& sort) {
  Type t;
  switch (sort.kind) {
    case Sort::Kind::Bool: t.kind = Kind::Bool; break;
    case Sort::Kind::Int:
      t.kind = Kind::Int;
      t.lo = sort.lo;
      t.hi = sort.hi;
      break;
    case Sort::Kind::Enum:
      t.kind = Kind::Enum;
      t.labels.insert(sort.labels.begin(), sort.labels.end());
      break;
    case Sort::Kind::Array:
      t.kind = Kind::Array;
      t.lo = sort.lo;
      t.hi = sort.hi;
      if (sort.element) {
        Type e = of(*sort.element);
        t.elem_kind = e.kind;
        t.elem_lo = e.lo;
        t.elem_hi = e.hi;
      }
      break;
  }
  return t;
}

Type Type::element() const {
  Type t;
  t.kind = elem_kind;
  t.lo = elem_lo;
  t.hi = elem_hi;
  return t;
}

std::string describe(const Type& t) {
  switch (t.kind) {
    case Type::Kind::Error: return "<error>";
    case Type::Kind::Bool: return "bool";
    case Type::Kind::Int: return "integer " + std::to_string(t.lo) + ".." + std::to_string(t.hi);
    case Type::Kind::Enum: return "enum";
    case Type::Kind::Array: return "array " + std::to_string(t.lo) + ".." + std::to_string(t.hi) + " of " + describe(t.element());
  }
  return "?";
}

bool assignable(const Type& t, const Sort& sort) {
  switch (sort.kind) {
    case Sort::Kind::Bool: return t.kind == Type::Kind::Bool;
    case Sort::Kind::Int: return t.kind == Type::Kind::Int;
    case Sort::Kind::Enum: {
      if (t.kind != Type::Kind::Enum) return false;
      for (const auto& l : t.labels) {
        bool found = false;
        for (const auto& s : sort.labels) found = found || s == l;
        if (!found) return false;
      }
      return true;
    }
    case Sort::Kind::Array:
      return t.kind == Type::Kind::Array && t.hi - t.lo == sort.hi - sort.lo && sort.element &&
             assignable(t.element(), *sort.element);
  }
  return false;
}

bool within(const Type& t, const Sort& sort) {
  if (!assignable(t, sort)) return false;
  if (sort.kind == Sort::Kind::Int) return t.lo >= sort.lo && t.hi <= sort.hi;
  if (sort.kind == Sort::Kind::Array && sort.element && sort.element->kind == Sort::Kind::Int)
    return t.elem_lo >= sort.element->lo && t.elem_hi <= sort.element->hi;
  return true;
}

}  // namespace archpat::detail
