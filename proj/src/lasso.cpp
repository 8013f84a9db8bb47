#include <algorithm>
#include <map>

#include "archpat/checker.hpp"

namespace archpat {

LassoDiagnosis diagnose_lasso(const PatternSpec& spec, const LtlFormula& f, const Lasso& lasso) {
  LassoDiagnosis d;
  if (lasso.cycle.empty()) {
    d.problem = "empty cycle";
    return d;
  }
  const StateLayout layout(spec);
  std::vector<Valuation> word;
  for (const auto* part : {&lasso.prefix, &lasso.cycle}) {
    for (const auto& s : *part) {
      if (s.slots.size() != layout.slot_count()) {
        d.problem = "state has the wrong number of slots";
        return d;
      }
      word.push_back(layout.decode(s));
    }
  }
  const std::size_t n = word.size();
  const std::size_t loop = lasso.prefix.size();

  try {
    const auto inits = reference::initial_states(spec);
    if (std::find(inits.begin(), inits.end(), word[0]) == inits.end()) {
      d.problem = "first state is not initial";
      return d;
    }
    std::map<Valuation, std::vector<Valuation>> cache;
    auto related = [&](const Valuation& from, const Valuation& to) {
      auto it = cache.find(from);
      if (it == cache.end()) {
        std::vector<Valuation> next;
        for (auto& [label, v] : reference::successors(spec, from)) next.push_back(std::move(v));
        it = cache.emplace(from, std::move(next)).first;
      }
      return std::find(it->second.begin(), it->second.end(), to) != it->second.end();
    };
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i + 1 < n ? i + 1 : loop;
      if (!related(word[i], word[j])) {
        const char* where = i + 1 == n ? "cycle wrap-around: " : i + 1 == loop ? "prefix/cycle seam: " : "";
        d.problem = where + std::string("no transition from position ") + std::to_string(i) + " to position " +
                    std::to_string(j);
        return d;
      }
    }
    d.trajectory_ok = true;
    d.violates = !holds_on_lasso(f, lasso.prefix.size(), lasso.cycle.size(),
                                 [&](const LtlFormula& atom, std::size_t pos) {
                                   return reference::eval_atom(spec, atom, word[pos]);
                                 });
  } catch (const EvalError& e) {
    d.trajectory_ok = false;
    d.problem = std::string("evaluation error in ") + e.where() + ": " + e.what();
  }
  return d;
}

bool verify_lasso(const PatternSpec& spec, const LtlFormula& f, const Lasso& lasso) {
  const LassoDiagnosis d = diagnose_lasso(spec, f, lasso);
  return d.trajectory_ok && d.violates;
}

}  // namespace archpat
