#pragma once

// Name resolution shared by validation, compilation and the reference
// evaluator. Internal header.

#include <set>
#include <string>
#include <unordered_map>

#include "archpat/model.hpp"

namespace archpat::detail {

enum class NameKind { Unknown, Port, Define, Control, Label, Env, Shared };

struct NameInfo {
  NameKind kind = NameKind::Unknown;
  const PortDecl* port = nullptr;     // Port
  const Definition* def = nullptr;    // Define / Shared
  const EnvVar* env = nullptr;        // Env
  int instance = -1;                  // index into architecture.instances, when qualified
  int define_index = -1;              // position within the owning define list
  int env_index = -1;
};

/// Read-only lookup tables over one spec. Holds pointers into the spec,
/// which must outlive it.
class Scope {
 public:
  explicit Scope(const PatternSpec& spec);

  const PatternSpec& spec() const { return *spec_; }

  /// Unqualified name inside a behavior of `iface`.
  NameInfo lookup_in_behavior(const InterfaceSpec& iface, const BehaviorSpec* behavior,
                              const std::string& name) const;

  /// Unqualified name at architecture level (bindings, env, shared, properties).
  NameInfo lookup_global(const std::string& name) const;

  /// `instance.name`: a port or the control state of an instance.
  NameInfo lookup_member(const std::string& instance, const std::string& name) const;

  int instance_index(const std::string& name) const;
  const InterfaceSpec* interface_of(int instance) const;
  const BehaviorSpec* behavior_of(int instance) const;

  bool is_label(const std::string& name) const { return labels_.count(name) != 0; }

 private:
  const PatternSpec* spec_;
  std::unordered_map<std::string, int> instances_;
  std::unordered_map<std::string, int> env_;
  std::unordered_map<std::string, int> shared_;
  std::set<std::string> labels_;
};

/// Static type of an expression; integer types carry a conservative interval.
struct Type {
  enum class Kind { Error, Bool, Int, Enum, Array };
  Kind kind = Kind::Error;
  std::int64_t lo = 0, hi = 0;           // Int interval / Array index range
  std::set<std::string> labels;          // Enum: possible labels
  Kind elem_kind = Kind::Error;          // Array element
  std::int64_t elem_lo = 0, elem_hi = 0;  // Array element interval

  static Type error() { return {}; }
  static Type boolean() { Type t; t.kind = Kind::Bool; return t; }
  static Type integer(std::int64_t lo, std::int64_t hi) { Type t; t.kind = Kind::Int; t.lo = lo; t.hi = hi; return t; }
  static Type of(const Sort& sort);

  bool ok() const { return kind != Kind::Error; }
  Type element() const;
};

std::string describe(const Type& t);

/// True when values of type `t` can be stored in `sort` without a sort
/// mismatch (integer intervals are not compared here).
bool assignable(const Type& t, const Sort& sort);

/// True when every value of `t` lies within `sort`.
bool within(const Type& t, const Sort& sort);

}  // namespace archpat::detail
