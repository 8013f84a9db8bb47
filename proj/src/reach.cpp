#include <algorithm>
#include <deque>
#include <unordered_map>

#include <omp.h>

#include "graph.hpp"

namespace archpat {

namespace detail {

std::uint32_t StateIndex::find(const GlobalState& s, std::size_t hash) const {
  const std::size_t mask = table_.size() - 1;
  for (std::size_t i = hash & mask;; i = (i + 1) & mask) {
    const std::uint32_t id = table_[i];
    if (id == kEmpty) return kEmpty;
    if (states_[id] == s) return id;
  }
}

void StateIndex::insert(std::uint32_t id, std::size_t hash) {
  if ((used_ + 1) * 2 > table_.size()) grow();
  const std::size_t mask = table_.size() - 1;
  std::size_t i = hash & mask;
  while (table_[i] != kEmpty) i = (i + 1) & mask;
  table_[i] = id;
  ++used_;
}

void StateIndex::grow() {
  std::vector<std::uint32_t> old(table_.size() * 2, kEmpty);
  old.swap(table_);
  const std::size_t mask = table_.size() - 1;
  GlobalStateHash hasher;
  for (std::uint32_t id : old) {
    if (id == kEmpty) continue;
    std::size_t i = hasher(states_[id]) & mask;
    while (table_[i] != kEmpty) i = (i + 1) & mask;
    table_[i] = id;
  }
}

namespace {

constexpr std::size_t kMaxRecordedErrors = 8;

struct Expansion {
  std::vector<GlobalState> next;
  std::vector<std::uint64_t> masks;
  std::optional<FirstError> error;
};

void expand_one(const System& sys, const std::vector<const AtomSet*>& atoms, const GlobalState& s, Workspace& ws,
                Expansion& out) {
  out.next.clear();
  out.masks.assign(atoms.size(), 0);
  out.error.reset();
  try {
    if (atoms.empty()) {
      sys.successors(s, ws, out.next);
    } else {
      out.masks[0] = sys.expand(s, *atoms[0], ws, out.next);
      for (std::size_t w = 1; w < atoms.size(); ++w) out.masks[w] = sys.atoms_at(s, *atoms[w], ws);
    }
  } catch (const EvalError& e) {
    out.next.clear();
    out.error = FirstError{s, e.kind(), e.where(), e.what()};
  }
}

}  // namespace

ExplicitGraph explore(const System& sys, const std::vector<const AtomSet*>& atoms, std::size_t max_states,
                      const Deadline& deadline, int threads) {
  ExplicitGraph g;
  g.atom_words = atoms.size();
  StateIndex index(g.states);
  GlobalStateHash hasher;
  bool overflow = false;

  auto intern = [&](const GlobalState& s) -> std::uint32_t {
    const std::size_t h = hasher(s);
    std::uint32_t id = index.find(s, h);
    if (id != StateIndex::kEmpty) return id;
    if (g.states.size() >= max_states) {
      overflow = true;
      return StateIndex::kEmpty;
    }
    id = static_cast<std::uint32_t>(g.states.size());
    g.states.push_back(s);
    index.insert(id, h);
    return id;
  };

  for (const auto& s : sys.initial_states()) {
    std::uint32_t id = intern(s);
    if (id == StateIndex::kEmpty) break;
    if (std::find(g.initial.begin(), g.initial.end(), id) == g.initial.end()) g.initial.push_back(id);
  }
  g.offsets.push_back(0);

  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
  std::vector<Workspace> workspaces(static_cast<std::size_t>(nthreads));
  std::vector<Expansion> results;

  std::size_t level_begin = 0;
  while (!overflow && level_begin < g.states.size()) {
    if (deadline.expired()) {
      g.timed_out = true;
      break;
    }
    const std::size_t level_end = g.states.size();
    const std::size_t width = level_end - level_begin;
    results.resize(std::max(results.size(), width));
    const std::int64_t n = static_cast<std::int64_t>(width);
#pragma omp parallel for schedule(dynamic, 64) num_threads(nthreads)
    for (std::int64_t i = 0; i < n; ++i) {
      const int t = omp_get_thread_num();
      expand_one(sys, atoms, g.states[level_begin + static_cast<std::size_t>(i)], workspaces[static_cast<std::size_t>(t)],
                 results[static_cast<std::size_t>(i)]);
    }
    // Order-preserving merge: ids and edges come out exactly as a serial
    // breadth-first search would produce them.
    for (std::size_t i = 0; i < width && !overflow; ++i) {
      Expansion& r = results[i];
      if (r.error) {
        if (g.errors.size() < kMaxRecordedErrors) g.errors.push_back(*r.error);
        ++g.error_count;
      }
      for (std::size_t w = 0; w < r.masks.size(); ++w) g.masks.push_back(r.masks[w]);
      for (const auto& s : r.next) {
        std::uint32_t id = intern(s);
        if (id == StateIndex::kEmpty) break;
        g.targets.push_back(id);
      }
      g.offsets.push_back(g.targets.size());
    }
    level_begin = level_end;
  }
  g.complete = !overflow && !g.timed_out && level_begin >= g.states.size();

  // States discovered but never expanded get an empty successor list and
  // their atom labels, so the partial graph can still be searched.
  const std::size_t expanded = g.offsets.size() - 1;
  const std::size_t total = g.states.size();
  if (expanded < total) {
    g.offsets.resize(total + 1, g.targets.size());
    if (!atoms.empty()) {
      g.masks.resize(total * atoms.size(), 0);
      std::vector<std::optional<FirstError>> late(total - expanded);
      const std::int64_t n = static_cast<std::int64_t>(total - expanded);
#pragma omp parallel for schedule(dynamic, 64) num_threads(nthreads)
      for (std::int64_t i = 0; i < n; ++i) {
        const std::size_t id = expanded + static_cast<std::size_t>(i);
        Workspace& ws = workspaces[static_cast<std::size_t>(omp_get_thread_num())];
        try {
          for (std::size_t w = 0; w < atoms.size(); ++w)
            g.masks[id * atoms.size() + w] = sys.atoms_at(g.states[id], *atoms[w], ws);
        } catch (const EvalError& e) {
          late[static_cast<std::size_t>(i)] = FirstError{g.states[id], e.kind(), e.where(), e.what()};
        }
      }
      for (auto& e : late) {
        if (!e) continue;
        if (g.errors.size() < kMaxRecordedErrors) g.errors.push_back(std::move(*e));
        ++g.error_count;
      }
    }
  }
  return g;
}

}  // namespace detail

namespace {

/// Straightforward serial breadth-first search; the reference the
/// parallel explorer is tested against.
ReachabilityReport reachable_serial(const System& sys, std::size_t bound) {
  ReachabilityReport report;
  std::unordered_map<GlobalState, std::size_t, GlobalStateHash> seen;
  std::deque<GlobalState> queue;
  bool overflow = false;
  auto visit = [&](const GlobalState& s) {
    if (seen.count(s)) return;
    if (seen.size() >= bound) {
      overflow = true;
      return;
    }
    seen.emplace(s, seen.size());
    queue.push_back(s);
  };
  for (const auto& s : sys.initial_states()) visit(s);
  Workspace ws;
  std::vector<GlobalState> next;
  while (!queue.empty() && !overflow) {
    GlobalState s = std::move(queue.front());
    queue.pop_front();
    next.clear();
    try {
      sys.successors(s, ws, next);
    } catch (const EvalError& e) {
      if (report.sample_violations.size() < detail::kMaxRecordedErrors)
        report.sample_violations.push_back({s, e.what()});
      continue;
    }
    for (const auto& n : next) {
      visit(n);
      if (overflow) break;
    }
  }
  report.states_visited = seen.size();
  report.frontier_exhausted = !overflow;
  return report;
}

}  // namespace

ReachabilityReport reachable(const PatternSpec& spec, std::optional<std::size_t> bound, int threads) {
  System sys(spec);
  const std::size_t limit = bound.value_or(static_cast<std::size_t>(detail::StateIndex::kEmpty) - 1);
  if (threads == 1) return reachable_serial(sys, limit);
  detail::Deadline unlimited;
  auto g = detail::explore(sys, {}, limit, unlimited, threads);
  ReachabilityReport report;
  report.states_visited = g.states.size();
  report.frontier_exhausted = g.complete;
  for (const auto& e : g.errors) report.sample_violations.push_back({e.state, e.message});
  return report;
}

}  // namespace archpat
