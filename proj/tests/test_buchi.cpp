#include <doctest.h>

#include <random>

#include "archpat/checker.hpp"
#include "support.hpp"

using namespace archpat;
using archpat::testing::ltl_or_die;

namespace {

/// Atom truth from a letter whose bit i belongs to `atoms[i]`.
bool letter_atom(const std::vector<LtlPtr>& atoms, const std::vector<std::uint64_t>& word, const LtlFormula& atom,
                 std::size_t pos) {
  for (std::size_t i = 0; i < atoms.size(); ++i)
    if (equal(*atoms[i], atom)) return (word[pos] >> i) & 1;
  FAIL("atom not collected: " << to_dsl(atom));
  return false;
}

}  // namespace

TEST_CASE("small automata have the expected sizes") {
  CHECK(to_buchi(*ltl_or_die("F p")).state_count == 2);
  CHECK(to_buchi(*ltl_or_die("G true")).state_count == 1);
  CHECK(to_buchi(*ltl_or_die("G (p -> F q)")).state_count == 2);
  const BuchiAutomaton never = to_buchi(*ltl_or_die("false"));
  CHECK(never.transitions.empty());
  CHECK_FALSE(buchi_accepts(never, {}, {0}));
}

TEST_CASE("atoms are collected once in first occurrence order") {
  auto f = ltl_or_die("G (a -> F b) & (b U a)");
  auto atoms = collect_atoms(*f);
  REQUIRE(atoms.size() == 2);
  CHECK(to_dsl(*atoms[0]) == "a");
  CHECK(to_dsl(*atoms[1]) == "b");
  CHECK(collect_atoms(*ltl_or_die("G true")).empty());
}

TEST_CASE("hand-picked words") {
  auto a = to_buchi(*ltl_or_die("G F p"));
  CHECK(buchi_accepts(a, {0, 0}, {0, 1}));
  CHECK_FALSE(buchi_accepts(a, {1, 1}, {0}));
  auto b = to_buchi(*ltl_or_die("p U q"));
  // bits: p = 1, q = 2
  CHECK(buchi_accepts(b, {1, 1, 2}, {0}));
  CHECK_FALSE(buchi_accepts(b, {1, 0, 2}, {0}));
  CHECK_FALSE(buchi_accepts(b, {}, {1}));
  auto c = to_buchi(*ltl_or_die("X X p"));
  CHECK(buchi_accepts(c, {0, 0, 1}, {0}));
  CHECK_FALSE(buchi_accepts(c, {1, 1}, {0}));
}

TEST_CASE("automata agree with direct evaluation on random formulas and words") {
  std::mt19937 rng(31337);
  const std::vector<std::string> names{"p", "q", "r"};
  int accepted = 0, rejected = 0;
  for (int i = 0; i < 400; ++i) {
    const int temporal = 1 + static_cast<int>(rng() % 4);
    const std::string text = testing::random_formula_text(rng, names, temporal);
    CAPTURE(text);
    LtlPtr f = ltl_or_die(text);
    const BuchiAutomaton aut = to_buchi(*f);
    for (int w = 0; w < 15; ++w) {
      const std::size_t prefix = rng() % 4, cycle = 1 + rng() % 4;
      std::vector<std::uint64_t> word(prefix + cycle);
      for (auto& letter : word) letter = rng() % (std::uint64_t{1} << aut.atoms.size());
      const std::vector<std::uint64_t> pre(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(prefix));
      const std::vector<std::uint64_t> cyc(word.begin() + static_cast<std::ptrdiff_t>(prefix), word.end());
      const bool direct = holds_on_lasso(*f, prefix, cycle, [&](const LtlFormula& atom, std::size_t pos) {
        return letter_atom(aut.atoms, word, atom, pos);
      });
      CHECK(buchi_accepts(aut, pre, cyc) == direct);
      (direct ? accepted : rejected)++;
    }
  }
  CHECK(accepted > 500);
  CHECK(rejected > 500);
}

TEST_CASE("more than 64 atoms is rejected") {
  std::string text = "G (";
  for (int i = 0; i < 65; ++i) text += (i ? " | v" : "v") + std::to_string(i);
  text += ")";
  CHECK(collect_atoms(*ltl_or_die("G (a | b)")).size() == 1);
  // Propositional disjunctions fold into one atom; force separate atoms with X.
  std::string split = "G (";
  for (int i = 0; i < 65; ++i) split += (i ? " | X v" : "X v") + std::to_string(i);
  split += ")";
  CHECK(collect_atoms(*ltl_or_die(split)).size() == 65);
  CHECK_THROWS_AS(to_buchi(*ltl_or_die(split)), std::invalid_argument);
  CHECK_NOTHROW(to_buchi(*ltl_or_die(text)));
}
