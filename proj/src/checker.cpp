#include <algorithm>
#include <deque>
#include <memory>
#include <unordered_map>

#include <omp.h>

#include "archpat/checker.hpp"
#include "graph.hpp"

namespace archpat {

namespace {

using detail::Deadline;

/// System states generated on demand for a single atom set.
class LazyKripke {
 public:
  LazyKripke(const System& sys, const AtomSet& atoms, const CheckLimits& limits, const Deadline& deadline,
             CheckStats& stats)
      : sys_(sys), atoms_(atoms), limits_(limits), deadline_(deadline), stats_(stats), index_(states_) {
    for (const auto& s : sys_.initial_states()) {
      const std::uint32_t id = intern(s);
      if (std::find(initial_.begin(), initial_.end(), id) == initial_.end()) initial_.push_back(id);
    }
  }

  const std::vector<std::uint32_t>& initial() const { return initial_; }
  std::size_t size() const { return states_.size(); }
  const GlobalState& state(std::uint32_t id) const { return states_[id]; }

  std::uint64_t label(std::uint32_t id) {
    if (!has_label_[id]) {
      try {
        labels_[id] = sys_.atoms_at(states_[id], atoms_, ws_);
      } catch (const EvalError& e) {
        throw StateEvalError(e, states_[id]);
      }
      has_label_[id] = 1;
    }
    return labels_[id];
  }

  void successors(std::uint32_t id, std::vector<std::uint32_t>& out) {
    if (!expanded_[id]) {
      if ((++expansions_ & 255) == 0 && deadline_.expired()) {
        stats_.system_states = states_.size();
        throw Inconclusive("time limit reached", stats_);
      }
      scratch_.clear();
      try {
        sys_.successors(states_[id], ws_, scratch_);
      } catch (const EvalError& e) {
        throw StateEvalError(e, states_[id]);
      }
      std::vector<std::uint32_t> ids;
      ids.reserve(scratch_.size());
      for (const auto& s : scratch_) ids.push_back(intern(s));
      succ_[id] = std::move(ids);
      expanded_[id] = 1;
    }
    out = succ_[id];
  }

 private:
  const System& sys_;
  const AtomSet& atoms_;
  const CheckLimits& limits_;
  const Deadline& deadline_;
  CheckStats& stats_;
  std::vector<GlobalState> states_;
  detail::StateIndex index_;
  GlobalStateHash hasher_;
  std::vector<std::uint32_t> initial_;
  std::vector<std::vector<std::uint32_t>> succ_;
  std::vector<std::uint64_t> labels_;
  std::vector<char> has_label_, expanded_;
  std::vector<GlobalState> scratch_;
  Workspace ws_;
  std::size_t expansions_ = 0;

  std::uint32_t intern(const GlobalState& s) {
    const std::size_t h = hasher_(s);
    std::uint32_t id = index_.find(s, h);
    if (id != detail::StateIndex::kEmpty) return id;
    if (states_.size() >= limits_.max_states) {
      stats_.system_states = states_.size();
      throw Inconclusive("state limit reached", stats_);
    }
    id = static_cast<std::uint32_t>(states_.size());
    states_.push_back(s);
    index_.insert(id, h);
    succ_.emplace_back();
    labels_.push_back(0);
    has_label_.push_back(0);
    expanded_.push_back(0);
    return id;
  }
};

/// View of a prebuilt explicit graph with labels projected onto one
/// property's atoms.
class ExplicitKripke {
 public:
  ExplicitKripke(const detail::ExplicitGraph& g, const std::vector<std::pair<std::size_t, int>>& atom_bits)
      : g_(g), labels_(g.states.size()) {
    for (std::size_t id = 0; id < g.states.size(); ++id) {
      std::uint64_t l = 0;
      for (std::size_t i = 0; i < atom_bits.size(); ++i) {
        const auto [word, bit] = atom_bits[i];
        if ((g.masks[id * g.atom_words + word] >> bit) & 1u) l |= std::uint64_t{1} << i;
      }
      labels_[id] = l;
    }
  }

  const std::vector<std::uint32_t>& initial() const { return g_.initial; }
  std::size_t size() const { return g_.states.size(); }
  const GlobalState& state(std::uint32_t id) const { return g_.states[id]; }
  std::uint64_t label(std::uint32_t id) const { return labels_[id]; }
  void successors(std::uint32_t id, std::vector<std::uint32_t>& out) const {
    auto s = g_.successors(id);
    out.assign(s.begin(), s.end());
  }

 private:
  const detail::ExplicitGraph& g_;
  std::vector<std::uint64_t> labels_;
};

/// Nested depth-first search over the product of a Kripke structure and a
/// Büchi automaton, both stacks kept explicitly.
template <class Kripke>
class NestedDfs {
 public:
  NestedDfs(Kripke& k, const BuchiAutomaton& a, CheckStats& stats)
      : k_(k), a_(a), out_(a.outgoing()), B_(static_cast<std::uint64_t>(a.state_count)), stats_(stats) {}

  std::optional<Lasso> run() {
    std::vector<std::uint32_t> succ;
    for (std::uint32_t s0 : k_.initial()) {
      const std::uint64_t l = k_.label(s0);
      for (int q : a_.initial) {
        for (int t : out_[q]) {
          const auto& tr = a_.transitions[t];
          if (!tr.guard.satisfied_by(l)) continue;
          const std::uint64_t p = s0 * B_ + static_cast<std::uint64_t>(tr.to);
          if (flag(p) & kBlue) continue;
          if (blue_search(p)) return lasso();
        }
      }
    }
    return std::nullopt;
  }

 private:
  static constexpr std::uint8_t kBlue = 1, kOnStack = 2, kRed = 4;

  struct Frame {
    std::uint64_t p;
    std::vector<std::uint64_t> succ;
    std::size_t next = 0;
  };

  Kripke& k_;
  const BuchiAutomaton& a_;
  std::vector<std::vector<int>> out_;
  std::uint64_t B_;
  CheckStats& stats_;
  std::vector<std::uint8_t> flags_;
  std::vector<Frame> blue_, red_;
  std::size_t hit_ = 0;  // blue stack index closing the cycle
  std::vector<std::uint32_t> scratch_;

  std::uint8_t& flag(std::uint64_t p) {
    if (p >= flags_.size()) flags_.resize(std::max<std::size_t>(p + 1, flags_.size() * 2), 0);
    return flags_[p];
  }

  std::vector<std::uint64_t> product_successors(std::uint64_t p) {
    const auto s = static_cast<std::uint32_t>(p / B_);
    const auto q = static_cast<int>(p % B_);
    k_.successors(s, scratch_);
    std::vector<std::uint64_t> r;
    for (std::uint32_t s2 : scratch_) {
      const std::uint64_t l = k_.label(s2);
      for (int t : out_[q]) {
        const auto& tr = a_.transitions[t];
        if (tr.guard.satisfied_by(l)) r.push_back(s2 * B_ + static_cast<std::uint64_t>(tr.to));
      }
    }
    return r;
  }

  bool accepting(std::uint64_t p) const { return a_.accepting[p % B_] != 0; }

  bool blue_search(std::uint64_t root) {
    blue_.clear();
    auto push = [&](std::uint64_t p) {
      flag(p) |= kBlue | kOnStack;
      ++stats_.product_states;
      blue_.push_back({p, product_successors(p), 0});
    };
    push(root);
    while (!blue_.empty()) {
      Frame& f = blue_.back();
      if (f.next < f.succ.size()) {
        const std::uint64_t p = f.succ[f.next++];
        if (!(flag(p) & kBlue)) push(p);
        continue;
      }
      if (accepting(f.p) && red_search(f.p)) return true;
      flag(f.p) &= static_cast<std::uint8_t>(~kOnStack);
      blue_.pop_back();
    }
    return false;
  }

  bool red_search(std::uint64_t seed) {
    red_.clear();
    red_.push_back({seed, product_successors(seed), 0});
    while (!red_.empty()) {
      Frame& f = red_.back();
      if (f.next >= f.succ.size()) {
        red_.pop_back();
        continue;
      }
      const std::uint64_t p = f.succ[f.next++];
      if (flag(p) & kOnStack) {
        for (std::size_t i = 0; i < blue_.size(); ++i) {
          if (blue_[i].p == p) {
            hit_ = i;
            return true;
          }
        }
      }
      if (!(flag(p) & kRed)) {
        flag(p) |= kRed;
        red_.push_back({p, product_successors(p), 0});
      }
    }
    return false;
  }

  /// Shortest path through already-visited product states from any of
  /// `sources` to `target`, both ends included.
  std::vector<std::uint64_t> shortest_path(const std::vector<std::uint64_t>& sources, std::uint64_t target) {
    std::unordered_map<std::uint64_t, std::uint64_t> parent;
    std::deque<std::uint64_t> queue;
    for (std::uint64_t p : sources)
      if (flag(p) != 0 && parent.emplace(p, p).second) queue.push_back(p);
    while (!queue.empty()) {
      const std::uint64_t p = queue.front();
      queue.pop_front();
      if (p == target) {
        std::vector<std::uint64_t> path{p};
        for (std::uint64_t c = p; parent.at(c) != c;) path.push_back(c = parent.at(c));
        std::reverse(path.begin(), path.end());
        return path;
      }
      for (std::uint64_t n : product_successors(p)) {
        if (flag(n) == 0 || !parent.emplace(n, p).second) continue;
        queue.push_back(n);
      }
    }
    return {};
  }

  std::vector<std::uint64_t> initial_products() {
    std::vector<std::uint64_t> r;
    for (std::uint32_t s0 : k_.initial()) {
      const std::uint64_t l = k_.label(s0);
      for (int q : a_.initial)
        for (int t : out_[q]) {
          const auto& tr = a_.transitions[t];
          const std::uint64_t p = s0 * B_ + static_cast<std::uint64_t>(tr.to);
          if (tr.guard.satisfied_by(l) && flag(p) != 0) r.push_back(p);
        }
    }
    return r;
  }

  /// The lasso found by the search, tightened to a shortest prefix to the
  /// accepting seed and a shortest cycle through it.
  Lasso lasso() {
    auto sys_state = [&](std::uint64_t p) { return k_.state(static_cast<std::uint32_t>(p / B_)); };
    const std::uint64_t seed = blue_.back().p;
    const std::vector<std::uint64_t> prefix = shortest_path(initial_products(), seed);
    const std::vector<std::uint64_t> loop = shortest_path(product_successors(seed), seed);
    Lasso l;
    if (!prefix.empty() && !loop.empty()) {
      for (std::size_t i = 0; i + 1 < prefix.size(); ++i) l.prefix.push_back(sys_state(prefix[i]));
      l.cycle.push_back(sys_state(seed));
      for (std::size_t i = 0; i + 1 < loop.size(); ++i) l.cycle.push_back(sys_state(loop[i]));
      return l;
    }
    for (std::size_t i = 0; i < hit_; ++i) l.prefix.push_back(sys_state(blue_[i].p));
    for (std::size_t i = hit_; i < blue_.size(); ++i) l.cycle.push_back(sys_state(blue_[i].p));
    for (std::size_t i = 1; i < red_.size(); ++i) l.cycle.push_back(sys_state(red_[i].p));
    return l;
  }
};

LtlPtr negation(const LtlFormula& f) {
  return LtlFormula::unary(LtlFormula::Kind::Not, std::make_shared<LtlFormula>(f));
}

}  // namespace

Verdict check_formula(const PatternSpec& spec, const LtlFormula& f, const CheckLimits& limits) {
  Deadline deadline;
  deadline.max_seconds = limits.max_seconds;
  System sys(spec);
  const BuchiAutomaton a = to_buchi(*negation(f));
  const AtomSet atoms = sys.compile_atoms(a.atoms);
  Verdict v;
  v.stats.buchi_states = static_cast<std::size_t>(a.state_count);
  LazyKripke k(sys, atoms, limits, deadline, v.stats);
  NestedDfs<LazyKripke> search(k, a, v.stats);
  v.counterexample = search.run();
  v.holds = !v.counterexample;
  v.stats.system_states = k.size();
  v.stats.time_ms = deadline.elapsed_ms();
  return v;
}

Verdict check_property(const PatternSpec& spec, const std::string& prop_name, const CheckLimits& limits) {
  const Property* p = spec.find_property(prop_name);
  if (!p) throw std::invalid_argument("unknown property '" + prop_name + "'");
  return check_formula(spec, *p->formula, limits);
}

const char* to_string(PropertyOutcome::Status s) {
  switch (s) {
    case PropertyOutcome::Status::Holds: return "holds";
    case PropertyOutcome::Status::Violated: return "violated";
    case PropertyOutcome::Status::Inconclusive: return "inconclusive";
    case PropertyOutcome::Status::Error: return "error";
  }
  return "error";
}

std::vector<PropertyOutcome> check_properties(const PatternSpec& spec, const std::vector<Property>& properties,
                                              const CheckLimits& limits, int threads) {
  Deadline deadline;
  deadline.max_seconds = limits.max_seconds;
  System sys(spec);
  const std::size_t n = properties.size();
  std::vector<PropertyOutcome> outcomes(n);
  std::vector<std::optional<BuchiAutomaton>> automata(n);

  // Shared atom table: every distinct atom once, in chunks of 64.
  std::vector<LtlPtr> all_atoms;
  std::vector<std::vector<std::pair<std::size_t, int>>> bits(n);
  for (std::size_t i = 0; i < n; ++i) {
    outcomes[i].name = properties[i].name;
    try {
      automata[i] = to_buchi(*negation(*properties[i].formula));
    } catch (const std::exception& e) {
      outcomes[i].status = PropertyOutcome::Status::Error;
      outcomes[i].message = e.what();
      continue;
    }
    for (const auto& atom : automata[i]->atoms) {
      std::size_t j = 0;
      while (j < all_atoms.size() && !equal(*all_atoms[j], *atom)) ++j;
      if (j == all_atoms.size()) all_atoms.push_back(atom);
      bits[i].push_back({j / 64, static_cast<int>(j % 64)});
    }
  }
  std::vector<AtomSet> sets;
  for (std::size_t b = 0; b < all_atoms.size(); b += 64) {
    const auto end = all_atoms.begin() + static_cast<std::ptrdiff_t>(std::min(all_atoms.size(), b + 64));
    sets.push_back(sys.compile_atoms({all_atoms.begin() + static_cast<std::ptrdiff_t>(b), end}));
  }
  std::vector<const AtomSet*> set_ptrs;
  for (const auto& s : sets) set_ptrs.push_back(&s);

  const detail::ExplicitGraph g = detail::explore(sys, set_ptrs, limits.max_states, deadline, threads);

  if (g.error_count > 0) {
    const auto& first = g.errors.front();
    for (std::size_t i = 0; i < n; ++i) {
      if (!automata[i]) continue;
      outcomes[i].status = PropertyOutcome::Status::Error;
      outcomes[i].message = std::string(to_string(first.kind)) + " error in " + first.where + ": " + first.message;
      outcomes[i].error_state = first.state;
      outcomes[i].stats.system_states = g.states.size();
    }
    return outcomes;
  }

  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
  const std::int64_t count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
  for (std::int64_t ii = 0; ii < count; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    if (!automata[i]) continue;
    PropertyOutcome& out = outcomes[i];
    Deadline local;
    try {
      ExplicitKripke k(g, bits[i]);
      Verdict v;
      v.stats.buchi_states = static_cast<std::size_t>(automata[i]->state_count);
      v.stats.system_states = g.states.size();
      NestedDfs<ExplicitKripke> search(k, *automata[i], v.stats);
      v.counterexample = search.run();
      v.holds = !v.counterexample;
      v.stats.time_ms = local.elapsed_ms();
      out.stats = v.stats;
      if (v.counterexample) {
        out.status = PropertyOutcome::Status::Violated;
        out.verdict = std::move(v);
      } else if (g.complete) {
        out.status = PropertyOutcome::Status::Holds;
        out.verdict = std::move(v);
      } else {
        out.status = PropertyOutcome::Status::Inconclusive;
        out.message = g.timed_out ? "time limit reached" : "state limit reached";
      }
    } catch (const std::exception& e) {
      out.status = PropertyOutcome::Status::Error;
      out.message = e.what();
    }
  }
  return outcomes;
}

std::vector<PropertyOutcome> check_all(const PatternSpec& spec, const CheckLimits& limits, int threads) {
  return check_properties(spec, spec.properties, limits, threads);
}

}  // namespace archpat
