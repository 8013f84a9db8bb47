#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "archpat/checker.hpp"

namespace archpat {

namespace {

bool is_constant_atom(const LtlFormula& f, bool* value) {
  if (f.kind != LtlFormula::Kind::Atom || !f.atom || f.atom->kind != Expr::Kind::BoolLit) return false;
  *value = f.atom->bool_value;
  return true;
}

void gather_atoms(const LtlPtr& f, std::vector<LtlPtr>& out) {
  using K = LtlFormula::Kind;
  bool constant = false;
  if (f->kind == K::Atom || f->kind == K::Active || f->kind == K::Connected) {
    if (is_constant_atom(*f, &constant)) return;
    for (const auto& a : out)
      if (equal(*a, *f)) return;
    out.push_back(f);
    return;
  }
  for (const auto& op : f->operands) gather_atoms(op, out);
}

// --- negation normal form ----------------------------------------------------

enum class NK { True, False, Lit, And, Or, Next, Until, Release };

struct NNode {
  NK kind;
  int atom = -1;
  bool negated = false;
  int a = -1, b = -1;
};

class NnfTable {
 public:
  explicit NnfTable(const std::vector<LtlPtr>& atoms) : atoms_(atoms) {}

  std::vector<NNode> nodes;

  int build(const LtlFormula& f, bool negated) {
    using K = LtlFormula::Kind;
    bool value = false;
    switch (f.kind) {
      case K::Atom:
      case K::Active:
      case K::Connected:
        if (is_constant_atom(f, &value)) return (value != negated) ? make(NK::True) : make(NK::False);
        return lit(atom_index(f), negated);
      case K::Not:
        return build(*f.operands[0], !negated);
      case K::And:
        return make(negated ? NK::Or : NK::And, build(*f.operands[0], negated), build(*f.operands[1], negated));
      case K::Or:
        return make(negated ? NK::And : NK::Or, build(*f.operands[0], negated), build(*f.operands[1], negated));
      case K::Implies:
        return negated ? make(NK::And, build(*f.operands[0], false), build(*f.operands[1], true))
                       : make(NK::Or, build(*f.operands[0], true), build(*f.operands[1], false));
      case K::Globally:
        return negated ? make(NK::Until, make(NK::True), build(*f.operands[0], true))
                       : make(NK::Release, make(NK::False), build(*f.operands[0], false));
      case K::Eventually:
        return negated ? make(NK::Release, make(NK::False), build(*f.operands[0], true))
                       : make(NK::Until, make(NK::True), build(*f.operands[0], false));
      case K::Next:
        return make(NK::Next, build(*f.operands[0], negated));
      case K::Until:
        return make(negated ? NK::Release : NK::Until, build(*f.operands[0], negated),
                    build(*f.operands[1], negated));
    }
    return make(NK::False);
  }

  /// Id of the complementary literal, or -1 if it was never created.
  int complement(int id) const {
    const NNode& n = nodes[id];
    auto it = index_.find({NK::Lit, n.atom, !n.negated, -1, -1});
    return it == index_.end() ? -1 : it->second;
  }

 private:
  const std::vector<LtlPtr>& atoms_;
  std::map<std::tuple<NK, int, bool, int, int>, int> index_;

  int atom_index(const LtlFormula& f) const {
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      if (equal(*atoms_[i], f)) return static_cast<int>(i);
    throw std::logic_error("atom not collected");
  }

  int intern(NNode n) {
    auto key = std::make_tuple(n.kind, n.atom, n.negated, n.a, n.b);
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(nodes.size());
    nodes.push_back(n);
    index_.emplace(key, id);
    return id;
  }

  int lit(int atom, bool negated) { return intern({NK::Lit, atom, negated, -1, -1}); }

  int make(NK k, int a = -1, int b = -1) {
    auto is = [&](int id, NK kind) { return id >= 0 && nodes[id].kind == kind; };
    switch (k) {
      case NK::And:
        if (is(a, NK::False) || is(b, NK::False)) return make(NK::False);
        if (is(a, NK::True)) return b;
        if (is(b, NK::True) || a == b) return a;
        if (a > b) std::swap(a, b);
        break;
      case NK::Or:
        if (is(a, NK::True) || is(b, NK::True)) return make(NK::True);
        if (is(a, NK::False)) return b;
        if (is(b, NK::False) || a == b) return a;
        if (a > b) std::swap(a, b);
        break;
      case NK::Next:
        if (is(a, NK::True) || is(a, NK::False)) return a;
        break;
      case NK::Until:
      case NK::Release:
        if (is(b, NK::True) || is(b, NK::False)) return b;
        break;
      default:
        break;
    }
    return intern({k, -1, false, a, b});
  }
};

// --- tableau -------------------------------------------------------------------

using IdSet = std::set<int>;
constexpr int kInit = -1;

struct TableauNode {
  IdSet incoming;
  IdSet old;
  IdSet next;
};

class Tableau {
 public:
  explicit Tableau(NnfTable& t) : t_(t) {}

  std::vector<TableauNode> nodes;

  void run(int root) {
    work_.push_back({{kInit}, {root}, {}, {}});
    while (!work_.empty()) {
      Item it = std::move(work_.back());
      work_.pop_back();
      expand(std::move(it));
    }
  }

 private:
  struct Item {
    IdSet incoming, fresh, old, next;
  };

  NnfTable& t_;
  std::vector<Item> work_;

  void expand(Item n) {
    while (!n.fresh.empty()) {
      const int eta = *n.fresh.begin();
      n.fresh.erase(n.fresh.begin());
      if (n.old.count(eta)) continue;
      const NNode node = t_.nodes[eta];
      auto add_fresh = [&](Item& item, int f) {
        if (!item.old.count(f)) item.fresh.insert(f);
      };
      switch (node.kind) {
        case NK::False:
          return;
        case NK::True:
          n.old.insert(eta);
          break;
        case NK::Lit: {
          int c = t_.complement(eta);
          if (c >= 0 && n.old.count(c)) return;
          n.old.insert(eta);
          break;
        }
        case NK::And:
          n.old.insert(eta);
          add_fresh(n, node.a);
          add_fresh(n, node.b);
          break;
        case NK::Next:
          n.old.insert(eta);
          n.next.insert(node.a);
          break;
        case NK::Or:
        case NK::Until:
        case NK::Release: {
          n.old.insert(eta);
          Item second = n;
          if (node.kind == NK::Or) {
            add_fresh(n, node.a);
            add_fresh(second, node.b);
          } else if (node.kind == NK::Until) {
            add_fresh(n, node.a);
            n.next.insert(eta);
            add_fresh(second, node.b);
          } else {
            add_fresh(n, node.b);
            n.next.insert(eta);
            add_fresh(second, node.a);
            add_fresh(second, node.b);
          }
          work_.push_back(std::move(second));
          break;
        }
      }
    }
    for (auto& existing : nodes) {
      if (existing.old == n.old && existing.next == n.next) {
        existing.incoming.insert(n.incoming.begin(), n.incoming.end());
        return;
      }
    }
    const int id = static_cast<int>(nodes.size());
    nodes.push_back({n.incoming, n.old, n.next});
    work_.push_back({{id}, n.next, {}, {}});
  }
};

// --- automaton assembly ------------------------------------------------------

struct Raw {
  int states = 0;
  int initial = 0;
  std::vector<char> accepting;
  std::vector<std::vector<std::pair<BuchiGuard, int>>> edges;
};

void add_edge(std::vector<std::pair<BuchiGuard, int>>& list, BuchiGuard g, int to) {
  if (g.pos & g.neg) return;
  for (const auto& [h, t] : list)
    if (t == to && (h.pos & ~g.pos) == 0 && (h.neg & ~g.neg) == 0) return;  // subsumed by a weaker guard
  std::erase_if(list, [&](const auto& e) {
    return e.second == to && (g.pos & ~e.first.pos) == 0 && (g.neg & ~e.first.neg) == 0;
  });
  list.push_back({g, to});
}

Raw degeneralize(const NnfTable& t, const std::vector<TableauNode>& nodes) {
  std::vector<int> untils;
  for (std::size_t i = 0; i < t.nodes.size(); ++i)
    if (t.nodes[i].kind == NK::Until) untils.push_back(static_cast<int>(i));
  const int k = static_cast<int>(untils.size());
  const int n = static_cast<int>(nodes.size());

  auto in_set = [&](int node, int i) {
    const auto& old = nodes[node].old;
    const int u = untils[i];
    return !old.count(u) || old.count(t.nodes[u].b);
  };
  std::vector<BuchiGuard> label(n);
  for (int q = 0; q < n; ++q) {
    for (int f : nodes[q].old) {
      const NNode& x = t.nodes[f];
      if (x.kind != NK::Lit) continue;
      (x.negated ? label[q].neg : label[q].pos) |= std::uint64_t{1} << x.atom;
    }
  }
  std::vector<std::vector<int>> succ(n + 1);  // index n is the initial pseudo-node
  for (int q = 0; q < n; ++q)
    for (int p : nodes[q].incoming) succ[p == kInit ? n : p].push_back(q);

  const int layers = std::max(k, 1);
  Raw raw;
  std::map<std::pair<int, int>, int> ids;
  std::vector<std::pair<int, int>> todo;
  auto id_of = [&](int q, int i) {
    auto [it, fresh] = ids.emplace(std::make_pair(q, i), raw.states);
    if (fresh) {
      ++raw.states;
      raw.accepting.push_back(q != n && (k == 0 || (i == 0 && in_set(q, 0))));
      raw.edges.emplace_back();
      todo.push_back({q, i});
    }
    return it->second;
  };
  raw.initial = id_of(n, 0);
  if (k == 0) raw.accepting[raw.initial] = 1;
  while (!todo.empty()) {
    auto [q, i] = todo.back();
    todo.pop_back();
    const int from = ids.at({q, i});
    const int j = (k > 0 && q != n && in_set(q, i)) ? (i + 1) % layers : i;
    for (int r : succ[q]) {
      const int to = id_of(r, j);
      add_edge(raw.edges[from], label[r], to);
    }
  }
  return raw;
}

/// Keeps states that are reachable and can reach an accepting cycle.
Raw prune(const Raw& raw) {
  const int n = raw.states;
  std::vector<std::vector<int>> fwd(n), rev(n);
  for (int p = 0; p < n; ++p)
    for (const auto& [g, q] : raw.edges[p]) {
      fwd[p].push_back(q);
      rev[q].push_back(p);
    }
  auto closure = [&](std::vector<int> seeds, const std::vector<std::vector<int>>& adj, bool step_first) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack;
    for (int s : seeds) {
      if (step_first) {
        for (int t : adj[s]) stack.push_back(t);
      } else {
        stack.push_back(s);
      }
    }
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      if (seen[v]) continue;
      seen[v] = 1;
      for (int w : adj[v]) stack.push_back(w);
    }
    return seen;
  };
  const auto reach = closure({raw.initial}, fwd, false);
  std::vector<int> good;
  for (int v = 0; v < n; ++v) {
    if (!raw.accepting[v] || !reach[v]) continue;
    if (closure({v}, fwd, true)[v]) good.push_back(v);
  }
  const auto live = closure(good, rev, false);

  Raw out;
  std::vector<int> map(n, -1);
  for (int v = 0; v < n; ++v) {
    if ((reach[v] && live[v]) || v == raw.initial) {
      map[v] = out.states++;
      out.accepting.push_back(raw.accepting[v]);
    }
  }
  out.initial = map[raw.initial];
  out.edges.resize(out.states);
  for (int v = 0; v < n; ++v) {
    if (map[v] < 0) continue;
    for (const auto& [g, q] : raw.edges[v])
      if (map[q] >= 0) add_edge(out.edges[map[v]], g, map[q]);
  }
  return out;
}

/// Quotient by the coarsest partition that respects acceptance and
/// outgoing (guard, target class) sets. The initial state has no incoming
/// edges, so its acceptance is irrelevant and it may join any class with the
/// same outgoing behavior.
Raw minimize(const Raw& raw) {
  const int n = raw.states;
  using Sig = std::pair<int, std::vector<std::tuple<std::uint64_t, std::uint64_t, int>>>;
  std::vector<int> cls(n);
  for (int v = 0; v < n; ++v) cls[v] = raw.accepting[v] ? 1 : 0;
  auto signature = [&](int v, int acc) {
    Sig s{acc, {}};
    for (const auto& [g, q] : raw.edges[v]) s.second.emplace_back(g.pos, g.neg, cls[q]);
    std::sort(s.second.begin(), s.second.end());
    s.second.erase(std::unique(s.second.begin(), s.second.end()), s.second.end());
    return s;
  };
  for (int count = -1;;) {
    std::map<Sig, int> ids;
    std::vector<int> next(n);
    for (int v = 0; v < n; ++v) {
      if (v == raw.initial) continue;
      next[v] = ids.emplace(signature(v, cls[v]), static_cast<int>(ids.size())).first->second;
    }
    const Sig init_sig = signature(raw.initial, 0);
    int init_cls = -1;
    for (const auto& [sig, id] : ids)
      if (sig.second == init_sig.second) init_cls = id;
    next[raw.initial] = init_cls >= 0 ? init_cls : static_cast<int>(ids.size());
    const int total = static_cast<int>(ids.size()) + (init_cls >= 0 ? 0 : 1);
    cls = std::move(next);
    if (total == count) break;
    count = total;
  }
  // Renumber classes in discovery order from the initial state.
  std::map<int, int> order;
  std::vector<int> queue{raw.initial};
  std::vector<int> rep;
  order[cls[raw.initial]] = 0;
  rep.push_back(raw.initial);
  for (std::size_t i = 0; i < queue.size(); ++i) {
    for (const auto& [g, q] : raw.edges[queue[i]]) {
      if (order.emplace(cls[q], static_cast<int>(order.size())).second) {
        rep.push_back(q);
        queue.push_back(q);
      }
    }
  }
  Raw out;
  out.states = static_cast<int>(rep.size());
  out.initial = 0;
  out.edges.resize(out.states);
  out.accepting.assign(out.states, 0);
  for (int v = 0; v < n; ++v) {
    auto it = order.find(cls[v]);
    if (it == order.end()) continue;
    if (v != raw.initial || rep[it->second] == raw.initial) out.accepting[it->second] |= raw.accepting[v];
  }
  for (int c = 0; c < out.states; ++c)
    for (const auto& [g, q] : raw.edges[rep[c]]) add_edge(out.edges[c], g, order.at(cls[q]));
  return out;
}

}  // namespace

std::vector<std::vector<int>> BuchiAutomaton::outgoing() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(state_count));
  for (std::size_t i = 0; i < transitions.size(); ++i) out[transitions[i].from].push_back(static_cast<int>(i));
  return out;
}

std::vector<LtlPtr> collect_atoms(const LtlFormula& f) {
  std::vector<LtlPtr> atoms;
  for (const auto& op : f.operands) gather_atoms(op, atoms);
  if (f.operands.empty()) {
    bool value = false;
    if (!is_constant_atom(f, &value)) atoms.push_back(std::make_shared<LtlFormula>(f));
  }
  return atoms;
}

BuchiAutomaton to_buchi(const LtlFormula& f) {
  BuchiAutomaton a;
  a.atoms = collect_atoms(f);
  if (a.atoms.size() > 64) throw std::invalid_argument("formula has more than 64 distinct atoms");
  NnfTable table(a.atoms);
  const int root = table.build(f, false);
  Tableau tableau(table);
  tableau.run(root);
  Raw raw = minimize(prune(degeneralize(table, tableau.nodes)));
  a.state_count = raw.states;
  a.initial = {raw.initial};
  a.accepting = raw.accepting;
  for (int p = 0; p < raw.states; ++p)
    for (const auto& [g, q] : raw.edges[p]) a.transitions.push_back({p, g, q});
  return a;
}

bool buchi_accepts(const BuchiAutomaton& a, const std::vector<std::uint64_t>& prefix,
                   const std::vector<std::uint64_t>& cycle) {
  if (cycle.empty()) throw std::invalid_argument("empty cycle");
  const std::size_t len = prefix.size() + cycle.size();
  auto letter = [&](std::size_t pos) { return pos < prefix.size() ? prefix[pos] : cycle[pos - prefix.size()]; };
  auto next_pos = [&](std::size_t pos) { return pos + 1 < len ? pos + 1 : prefix.size(); };
  const auto out = a.outgoing();
  const std::size_t nodes = static_cast<std::size_t>(a.state_count) * len;
  auto id = [&](int q, std::size_t pos) { return static_cast<std::size_t>(q) * len + pos; };
  auto successors = [&](std::size_t v) {
    const int q = static_cast<int>(v / len);
    const std::size_t pos = v % len;
    std::vector<std::size_t> r;
    for (int t : out[q])
      if (a.transitions[t].guard.satisfied_by(letter(pos))) r.push_back(id(a.transitions[t].to, next_pos(pos)));
    return r;
  };
  auto reach_from = [&](const std::vector<std::size_t>& seeds) {
    std::vector<char> seen(nodes, 0);
    std::vector<std::size_t> stack(seeds);
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      if (seen[v]) continue;
      seen[v] = 1;
      for (std::size_t w : successors(v)) stack.push_back(w);
    }
    return seen;
  };
  std::vector<std::size_t> starts;
  for (int q : a.initial) starts.push_back(id(q, 0));
  const auto reach = reach_from(starts);
  for (std::size_t v = 0; v < nodes; ++v) {
    if (!reach[v] || !a.accepting[v / len]) continue;
    if (reach_from(successors(v))[v]) return true;
  }
  return false;
}

bool holds_on_lasso(const LtlFormula& f, std::size_t prefix_length, std::size_t cycle_length,
                    const std::function<bool(const LtlFormula& atom, std::size_t position)>& atom_value) {
  if (cycle_length == 0) throw std::invalid_argument("empty cycle");
  const std::size_t n = prefix_length + cycle_length;
  auto nxt = [&](std::size_t i) { return i + 1 < n ? i + 1 : prefix_length; };
  using K = LtlFormula::Kind;
  std::function<std::vector<char>(const LtlFormula&)> eval = [&](const LtlFormula& g) -> std::vector<char> {
    std::vector<char> v(n, 0);
    switch (g.kind) {
      case K::Atom:
      case K::Active:
      case K::Connected:
        for (std::size_t i = 0; i < n; ++i) v[i] = atom_value(g, i);
        return v;
      case K::Not: {
        auto a = eval(*g.operands[0]);
        for (std::size_t i = 0; i < n; ++i) v[i] = !a[i];
        return v;
      }
      case K::And:
      case K::Or:
      case K::Implies: {
        auto a = eval(*g.operands[0]);
        auto b = eval(*g.operands[1]);
        for (std::size_t i = 0; i < n; ++i)
          v[i] = g.kind == K::And ? (a[i] && b[i]) : g.kind == K::Or ? (a[i] || b[i]) : (!a[i] || b[i]);
        return v;
      }
      case K::Next: {
        auto a = eval(*g.operands[0]);
        for (std::size_t i = 0; i < n; ++i) v[i] = a[nxt(i)];
        return v;
      }
      case K::Globally:
      case K::Eventually:
      case K::Until: {
        // Least fixpoint for U and F, greatest for G, by repeated sweeps.
        std::vector<char> a(n, 1), b;
        if (g.kind == K::Until) {
          a = eval(*g.operands[0]);
          b = eval(*g.operands[1]);
        } else {
          b = eval(*g.operands[0]);
        }
        const bool greatest = g.kind == K::Globally;
        v.assign(n, greatest ? 1 : 0);
        for (bool changed = true; changed;) {
          changed = false;
          for (std::size_t k = n; k-- > 0;) {
            const char nv = greatest ? (b[k] && v[nxt(k)]) : (b[k] || (a[k] && v[nxt(k)]));
            if (nv != v[k]) {
              v[k] = nv;
              changed = true;
            }
          }
        }
        return v;
      }
    }
    return v;
  };
  return eval(f)[0] != 0;
}

}  // namespace archpat
