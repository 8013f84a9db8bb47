#pragma once

// Explicit state graph built by parallel breadth-first exploration, and a
// lazily expanded counterpart. Internal header.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "archpat/semantics.hpp"

namespace archpat::detail {

/// Open-addressing set of state ids keyed by the states they index.
class StateIndex {
 public:
  explicit StateIndex(const std::vector<GlobalState>& states) : states_(states) { table_.assign(1024, kEmpty); }

  /// Returns the id of `s`, or kEmpty if absent.
  std::uint32_t find(const GlobalState& s, std::size_t hash) const;
  /// Records `id` (whose state is already stored) under `hash`.
  void insert(std::uint32_t id, std::size_t hash);

  static constexpr std::uint32_t kEmpty = 0xffffffffu;

 private:
  const std::vector<GlobalState>& states_;
  std::vector<std::uint32_t> table_;
  std::size_t used_ = 0;
  void grow();
};

struct Deadline {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double max_seconds = 0;  // <= 0: unlimited

  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  bool expired() const { return max_seconds > 0 && elapsed_ms() > max_seconds * 1000.0; }
};

struct FirstError {
  GlobalState state;
  EvalError::Kind kind;
  std::string where;
  std::string message;
};

struct ExplicitGraph {
  std::vector<GlobalState> states;    // ids in breadth-first order
  std::vector<std::uint32_t> initial;
  std::vector<std::uint64_t> offsets;  // CSR over `targets`; size states+1 when complete
  std::vector<std::uint32_t> targets;
  std::vector<std::uint64_t> masks;    // states.size() * atom_words
  std::size_t atom_words = 0;
  bool complete = false;               // fixpoint reached within limits
  bool timed_out = false;
  std::vector<FirstError> errors;      // evaluation errors, in discovery order (capped)
  std::size_t error_count = 0;

  std::span<const std::uint32_t> successors(std::uint32_t id) const {
    return {targets.data() + offsets[id], targets.data() + offsets[id + 1]};
  }
};

/// Breadth-first exploration with one level expanded in parallel and a
/// serial, order-preserving merge. `threads` <= 0 uses the OpenMP default.
ExplicitGraph explore(const System& sys, const std::vector<const AtomSet*>& atoms, std::size_t max_states,
                      const Deadline& deadline, int threads);

}  // namespace archpat::detail
