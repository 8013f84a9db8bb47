#include "support.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace archpat::testing {

namespace {

template <class T>
const T& pick(std::mt19937& rng, const std::vector<T>& xs) {
  return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)];
}

bool coin(std::mt19937& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

PatternSpec parse_or_die(const std::string& text) {
  ParseResult r = parse_pattern(text);
  if (!r.ok()) {
    std::ostringstream os;
    for (const auto& d : r.diagnostics) os << d << '\n';
    throw std::runtime_error("parse failed:\n" + os.str() + text);
  }
  auto diags = validate_spec(*r.spec);
  if (has_errors(diags)) {
    std::ostringstream os;
    for (const auto& d : diags) os << d << '\n';
    throw std::runtime_error("invalid spec:\n" + os.str() + text);
  }
  return std::move(*r.spec);
}

LtlPtr ltl_or_die(const std::string& text) {
  LtlParseResult r = parse_ltl(text);
  if (!r.formula) throw std::runtime_error("formula does not parse: " + text);
  return r.formula;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string source_path(const std::string& relative) { return std::string(ARCHPAT_SOURCE_DIR) + "/" + relative; }

std::string random_spec_text(std::mt19937& rng, const std::string& name) {
  const bool three_states = coin(rng, 0.3);
  const int modulus = coin(rng) ? 2 : 3;
  const std::vector<std::string> guards{"go", "!go", "n = 0", "n != 1", "go & n = 0", "!go | n = 1", "true"};
  const std::vector<std::string> conds{"go", "controlState = b", "!go & n = 1", "n = 0 & controlState = a"};
  const std::vector<std::string> outs{"n = 1", "controlState = b", "n >= 1 & go", "go | controlState = a"};
  std::ostringstream os;
  os << "pattern " << name << "\n\n";
  os << "interface Cell\n  in go : bool\n  local n : 0.." << modulus - 1 << "\n  out hi : bool\n\n";
  os << "behavior Cell states a, b" << (three_states ? ", c" : "") << " init a\n";
  os << "  init n := " << (coin(rng) ? 0 : 1) << "\n";
  os << "  trans a -> b when " << pick(rng, guards) << "\n";
  os << "  trans b -> " << (three_states ? "c" : "a") << " when " << pick(rng, guards) << "\n";
  if (three_states) os << "  trans c -> a when " << pick(rng, guards) << "\n";
  if (coin(rng, 0.3)) os << "  trans a -> a when true\n";
  os << "  next n := case " << pick(rng, conds) << " : (n + 1) mod " << modulus << "; true : n; esac\n";
  os << "  define hi := " << pick(rng, outs) << "\n\n";
  os << "architecture\n  component c1 : Cell (go := e)\n";
  if (coin(rng, 0.35)) os << "  component c2 : Cell (go := " << pick(rng, std::vector<std::string>{"c1.hi", "!e", "c1.hi | e"}) << ")\n";
  const std::vector<std::string> nexts{"{false, true}", "!e", "{false, true}", "case c1.hi : {false, true}; true : !e; esac"};
  os << "  env e : bool init " << (coin(rng) ? "false" : "true") << " next " << pick(rng, nexts) << "\n";
  return os.str();
}

std::vector<std::string> random_spec_atoms(const PatternSpec& spec) {
  std::vector<std::string> atoms{"e", "c1.hi", "c1.n = 0", "c1.n = 1"};
  if (spec.architecture.find_instance("c2")) {
    atoms.push_back("c2.hi");
    atoms.push_back("c2.n = 0");
  }
  return atoms;
}

std::string random_formula_text(std::mt19937& rng, const std::vector<std::string>& atoms, int temporal) {
  std::function<std::string(int)> gen = [&](int t) -> std::string {
    if (t == 0) {
      std::string a = pick(rng, atoms);
      if (coin(rng, 0.25)) return "!(" + a + ")";
      if (coin(rng, 0.2)) return "(" + a + " & " + pick(rng, atoms) + ")";
      return "(" + a + ")";
    }
    switch (std::uniform_int_distribution<int>(0, 8)(rng)) {
      case 0: return "G (" + gen(t - 1) + ")";
      case 1: return "F (" + gen(t - 1) + ")";
      case 2: return "X (" + gen(t - 1) + ")";
      case 3: {
        const int left = std::uniform_int_distribution<int>(0, t - 1)(rng);
        return "(" + gen(left) + ") U (" + gen(t - 1 - left) + ")";
      }
      case 4: {
        const int left = std::uniform_int_distribution<int>(0, t)(rng);
        return "(" + gen(left) + ") -> (" + gen(t - left) + ")";
      }
      case 5: {
        const int left = std::uniform_int_distribution<int>(0, t)(rng);
        return "(" + gen(left) + ") & (" + gen(t - left) + ")";
      }
      case 6: {
        const int left = std::uniform_int_distribution<int>(0, t)(rng);
        return "(" + gen(left) + ") | (" + gen(t - left) + ")";
      }
      case 7: return "!(" + gen(t) + ")";
      default: return "G (" + gen(t - 1) + ")";
    }
  };
  return gen(temporal);
}

RefGraph reference_graph(const PatternSpec& spec, std::size_t limit) {
  RefGraph g;
  std::map<Valuation, std::size_t> ids;
  auto intern = [&](const Valuation& v) {
    auto [it, fresh] = ids.emplace(v, g.states.size());
    if (fresh) {
      if (g.states.size() >= limit) throw std::runtime_error("reference graph too large");
      g.states.push_back(v);
      g.succ.emplace_back();
    }
    return it->second;
  };
  for (const auto& v : reference::initial_states(spec)) {
    const std::size_t id = intern(v);
    if (std::find(g.initial.begin(), g.initial.end(), id) == g.initial.end()) g.initial.push_back(id);
  }
  for (std::size_t i = 0; i < g.states.size(); ++i) {
    std::vector<std::size_t> next;
    for (const auto& [label, v] : reference::successors(spec, g.states[i])) next.push_back(intern(v));
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    g.succ[i] = std::move(next);
  }
  return g;
}

std::uint64_t path_count(const RefGraph& g, std::size_t max_len, std::uint64_t cap) {
  std::vector<std::uint64_t> ending(g.states.size(), 0);
  for (std::size_t s : g.initial) ending[s] = 1;
  std::uint64_t total = g.initial.size();
  for (std::size_t len = 2; len <= max_len && total < cap; ++len) {
    std::vector<std::uint64_t> next(g.states.size(), 0);
    for (std::size_t s = 0; s < g.states.size(); ++s)
      for (std::size_t t : g.succ[s]) next[t] = std::min(cap, next[t] + ending[s]);
    ending = std::move(next);
    for (auto c : ending) total = std::min(cap, total + c);
  }
  return total;
}

bool eval_lasso_word(const PatternSpec& spec, const LtlFormula& f, const std::vector<const Valuation*>& word,
                     std::size_t loop) {
  const std::size_t n = word.size();
  auto next = [&](std::size_t i) { return i + 1 < n ? i + 1 : loop; };
  std::map<std::pair<const LtlFormula*, std::size_t>, bool> memo;
  std::function<bool(const LtlFormula&, std::size_t)> at = [&](const LtlFormula& g, std::size_t i) -> bool {
    auto key = std::make_pair(&g, i);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    using K = LtlFormula::Kind;
    bool r = false;
    switch (g.kind) {
      case K::Atom:
      case K::Active:
      case K::Connected: r = reference::eval_atom(spec, g, *word[i]); break;
      case K::Not: r = !at(*g.operands[0], i); break;
      case K::And: r = at(*g.operands[0], i) && at(*g.operands[1], i); break;
      case K::Or: r = at(*g.operands[0], i) || at(*g.operands[1], i); break;
      case K::Implies: r = !at(*g.operands[0], i) || at(*g.operands[1], i); break;
      case K::Next: r = at(*g.operands[0], next(i)); break;
      case K::Globally: {
        // Walking n steps from i visits every position reachable from i.
        r = true;
        for (std::size_t k = i, step = 0; step < n; ++step, k = next(k))
          if (!at(*g.operands[0], k)) {
            r = false;
            break;
          }
        break;
      }
      case K::Eventually: {
        for (std::size_t k = i, step = 0; step < n && !r; ++step, k = next(k)) r = at(*g.operands[0], k);
        break;
      }
      case K::Until: {
        for (std::size_t k = i, step = 0; step < n; ++step, k = next(k)) {
          if (at(*g.operands[1], k)) {
            r = true;
            break;
          }
          if (!at(*g.operands[0], k)) break;
        }
        break;
      }
    }
    memo.emplace(key, r);
    return r;
  };
  return at(f, 0);
}

BruteForceResult brute_force(const PatternSpec& spec, const RefGraph& g, const LtlFormula& f, std::size_t max_len) {
  BruteForceResult result;
  std::vector<std::size_t> path;
  std::function<bool()> extend = [&]() -> bool {
    const std::size_t last = path.back();
    for (std::size_t j = 0; j < path.size(); ++j) {
      const auto& s = g.succ[last];
      if (!std::binary_search(s.begin(), s.end(), path[j])) continue;
      ++result.lassos;
      std::vector<const Valuation*> word;
      for (std::size_t id : path) word.push_back(&g.states[id]);
      if (!eval_lasso_word(spec, f, word, j)) {
        result.violated = true;
        result.prefix.assign(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(j));
        result.cycle.assign(path.begin() + static_cast<std::ptrdiff_t>(j), path.end());
        return true;
      }
    }
    if (path.size() >= max_len) return false;
    for (std::size_t t : g.succ[last]) {
      path.push_back(t);
      if (extend()) return true;
      path.pop_back();
    }
    return false;
  };
  for (std::size_t s0 : g.initial) {
    path.assign(1, s0);
    if (extend()) return result;
  }
  return result;
}

std::size_t lasso_bound(std::size_t states, int temporal) {
  const auto t = static_cast<std::size_t>(temporal);
  return (t + 1) * states + t;
}

std::string normalize_smv(const std::string& text) {
  std::string out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto c = line.find("--"); c != std::string::npos) line.erase(c);
    for (char ch : line)
      if (!std::isspace(static_cast<unsigned char>(ch))) out += ch;
  }
  for (std::size_t p; (p = out.find("notifacte")) != std::string::npos;) out.replace(p, 9, "notificate");
  return out;
}

std::string smv_module(const std::string& text, const std::string& name) {
  const std::string head = "MODULE " + name;
  std::size_t begin = std::string::npos;
  for (std::size_t p = text.find(head); p != std::string::npos; p = text.find(head, p + 1)) {
    const std::size_t after = p + head.size();
    if ((p == 0 || text[p - 1] == '\n') &&
        (after == text.size() || text[after] == '\n' || text[after] == ' ' || text[after] == '(')) {
      begin = p;
      break;
    }
  }
  if (begin == std::string::npos) return "";
  std::size_t end = text.size();
  for (const char* stop : {"\nMODULE ", "\nLTLSPEC ", "\n-- "}) {
    std::size_t q = text.find(stop, begin + 1);
    if (q != std::string::npos) end = std::min(end, q + 1);
  }
  return text.substr(begin, end - begin);
}

std::vector<std::string> smv_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '-') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' || text[j] == '.' ||
                                 text[j] == '@'))
        ++j;
      out.push_back(text.substr(i, j - i));
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back(text.substr(i, j - i));
      i = j;
    } else {
      static const char* two[] = {":=", "..", "!=", "<=", ">=", "->"};
      bool matched = false;
      for (const char* op : two) {
        if (text.compare(i, 2, op) == 0) {
          out.emplace_back(op);
          i += 2;
          matched = true;
          break;
        }
      }
      if (!matched) out.emplace_back(1, text[i++]);
    }
  }
  return out;
}

}  // namespace archpat::testing
