#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "archpat/checker.hpp"
#include "archpat/parser.hpp"

namespace archpat::testing {

/// Parses DSL text and fails loudly on any error diagnostic.
PatternSpec parse_or_die(const std::string& text);
LtlPtr ltl_or_die(const std::string& text);

std::string read_text(const std::string& path);
std::string source_path(const std::string& relative);

/// Small random spec in DSL text: one or two components over a shared
/// boolean env input, with counters and guarded transitions.
std::string random_spec_text(std::mt19937& rng, const std::string& name);

/// Random LTL formula text over `atoms` with exactly `temporal` temporal
/// operators.
std::string random_formula_text(std::mt19937& rng, const std::vector<std::string>& atoms, int temporal);

/// Atoms usable in formulas over random_spec_text specs.
std::vector<std::string> random_spec_atoms(const PatternSpec& spec);

/// Reachable graph under the reference semantics.
struct RefGraph {
  std::vector<Valuation> states;
  std::vector<std::size_t> initial;
  std::vector<std::vector<std::size_t>> succ;
};
RefGraph reference_graph(const PatternSpec& spec, std::size_t limit = 100000);

/// Number of state sequences of length <= max_len starting in an initial
/// state; saturates at `cap`.
std::uint64_t path_count(const RefGraph& g, std::size_t max_len, std::uint64_t cap);

/// Truth of `f` at position 0 of the lasso word, evaluated by position-wise
/// unrolling (no fixpoints, no automata).
bool eval_lasso_word(const PatternSpec& spec, const LtlFormula& f, const std::vector<const Valuation*>& word,
                     std::size_t loop);

struct BruteForceResult {
  bool violated = false;
  std::vector<std::size_t> prefix, cycle;  // state indices of the first violating lasso
  std::uint64_t lassos = 0;
};

/// Enumerates every lasso whose prefix plus cycle length is at most
/// `max_len` and reports whether one violates `f`.
BruteForceResult brute_force(const PatternSpec& spec, const RefGraph& g, const LtlFormula& f, std::size_t max_len);

/// Length bound used by the oracle: (t + 1) * |S| + t for t temporal operators.
std::size_t lasso_bound(std::size_t states, int temporal);

/// SMV text with `--` comments and all whitespace removed and the
/// `notifacte` spelling mapped to `notificate`.
std::string normalize_smv(const std::string& text);

/// Extracts one `MODULE <name>` block (up to the next MODULE or LTLSPEC).
std::string smv_module(const std::string& text, const std::string& name);

/// Minimal SMV tokenizer: identifiers (with dots), numbers, and operators.
std::vector<std::string> smv_tokens(const std::string& text);

}  // namespace archpat::testing
