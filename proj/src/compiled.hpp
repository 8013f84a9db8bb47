#pragma once

// Flat evaluation code for a validated spec. Internal header.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "archpat/semantics.hpp"
#include "scope.hpp"

namespace archpat::detail {

enum class Op : std::uint8_t {
  Const, Slot, Signal, Not, Neg, Add, Sub, Mul, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Case, Select
};

struct Node {
  Op op = Op::Const;
  std::int32_t a = -1;
  std::int32_t b = -1;
  std::int64_t imm = 0;       // Const value, Slot/Signal index, Select index offset
  std::uint32_t first = 0;    // Case: (cond, value) pairs in args; Select: elements in args
  std::uint32_t count = 0;
  std::int32_t site = -1;     // index into sites, for error messages
};

/// Membership test for values stored into or carried by a sorted port.
struct SortCheck {
  enum class Kind { None, Range, Labels } kind = Kind::None;
  std::int64_t lo = 0, hi = 0;
  std::vector<std::int64_t> labels;

  bool ok(std::int64_t v) const;
};

struct Choice {
  enum class Kind { Plain, Set, Case } kind = Kind::Plain;
  int node = -1;
  std::vector<int> set;
  std::vector<std::pair<int, Choice>> branches;
};

/// A stored scalar (slot) with the expression that assigns it.
struct Target {
  std::size_t slot = 0;
  Choice choice;
  SortCheck check;
  std::string where;
};

struct SignalCode {
  std::string name;       // "inst.port", "inst.helper", or shared name
  std::size_t offset = 0;
  std::vector<int> elements;
  std::vector<SortCheck> checks;  // per element; empty when unsorted
  bool array = false;
  std::int64_t lo = 0;
  const Sort* sort = nullptr;     // declared sort of ports
  int instance = -1;
  bool input = false, output = false;
};

struct TransitionCode {
  std::int64_t from = 0;
  std::vector<std::pair<int, std::int64_t>> guarded;  // guard node, target label
};

struct InstanceCode {
  std::string name;
  std::size_t control_slot = 0;
  std::int64_t initial = 0;
  std::vector<TransitionCode> transitions;
  std::vector<Target> inits;
  std::vector<Target> updates;
};

struct CompiledSystem {
  const PatternSpec& spec;
  StateLayout layout;
  std::vector<Node> nodes;
  std::vector<std::int32_t> args;
  std::vector<std::string> sites;
  std::vector<SignalCode> signals;  // in evaluation order
  std::map<std::pair<int, std::string>, std::size_t> signal_index;  // (instance or -1, name) -> signals
  std::size_t frame_size = 0;
  std::vector<InstanceCode> instances;
  std::vector<Target> env_inits, env_nexts;

  explicit CompiledSystem(const PatternSpec& s);

  std::int64_t eval(int node, const std::int32_t* slots, const std::int64_t* frame) const;
  void compute_signals(const GlobalState& s, std::vector<std::int64_t>& frame) const;
  void step(const GlobalState& s, const std::vector<std::int64_t>& frame, Workspace& ws,
            std::vector<GlobalState>& out) const;
  void choose(const Choice& c, const std::int32_t* slots, const std::int64_t* frame, std::vector<std::int64_t>& out) const;
  Value signal_value(const SignalCode& sig, const std::vector<std::int64_t>& frame) const;

  static std::vector<std::int64_t>& frame_of(Workspace& ws);
};

}  // namespace archpat::detail
