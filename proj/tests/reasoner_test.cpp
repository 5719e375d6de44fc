#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "mbd/reasoner.hpp"
#include "support/fixtures.hpp"
#include "support/naive.hpp"

using namespace mbd;

namespace {

std::vector<Sentence> S(std::initializer_list<Sentence> xs) { return xs; }

TEST(CheckConsistent, Examples) {
  DpllOracle dpll;
  TruthTableOracle table;
  const auto a = atom("A"), b = atom("B");
  for (ConsistencyOracle* o : {static_cast<ConsistencyOracle*>(&dpll), static_cast<ConsistencyOracle*>(&table)}) {
    EXPECT_EQ(o->check(S({a, implies(a, b), neg(b)})), Consistency::Inconsistent) << o->name();
    EXPECT_EQ(o->check(S({disj(a, b), neg(a)})), Consistency::Consistent) << o->name();
    EXPECT_EQ(o->check(S({})), Consistency::Consistent);
    EXPECT_EQ(o->check(S({Sentence::constant(false)})), Consistency::Inconsistent);
  }
}

TEST(CheckConsistent, Dpi1WithAllComponentsHealthyIsInconsistent) {
  const auto dpi = mbd::testing::dpi1();
  mbd::testing::NaiveSemantics naive(dpi);
  ASSERT_FALSE(naive.satisfiable_with(dpi.all_components()));
  DpllOracle oracle;
  EXPECT_EQ(oracle.check(encode_dpi(dpi, dpi.all_components(), {})), Consistency::Inconsistent);
}

TEST(CheckConsistent, StatsCountCallsAndClauses) {
  DpllOracle oracle;
  oracle.check(S({disj(atom("A"), atom("B")), neg(atom("A"))}));
  oracle.check(S({atom("A")}));
  EXPECT_EQ(oracle.stats().calls, 2u);
  EXPECT_EQ(oracle.stats().cumulative_clause_count, 3u);
}

// Pigeonhole 6 into 5 has no short DPLL refutation.
TEST(CheckConsistent, DecisionBudgetRaisesResourceLimit) {
  std::vector<Sentence> php;
  auto p = [](int i, int j) { return atom("p" + std::to_string(i) + "_" + std::to_string(j)); };
  for (int i = 0; i < 6; ++i) {
    Sentence some = p(i, 0);
    for (int j = 1; j < 5; ++j) some = disj(some, p(i, j));
    php.push_back(some);
  }
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < 6; ++i)
      for (int k = i + 1; k < 6; ++k) php.push_back(neg(conj(p(i, j), p(k, j))));
  DpllOracle tiny(10);
  EXPECT_THROW(tiny.check(php), ResourceLimitError);
  DpllOracle enough;
  EXPECT_EQ(enough.check(php), Consistency::Inconsistent);
}

TEST(TruthTable, RefusesTooManyFreeAtoms) {
  TruthTableOracle table(4);
  Sentence big = atom("a0");
  for (int i = 1; i < 6; ++i) big = disj(big, atom("a" + std::to_string(i)));
  EXPECT_THROW(table.check(S({big})), ResourceLimitError);
}

TEST(EncodeDpi, Examples) {
  const auto d1 = mbd::testing::dpi1();
  const auto all = encode_dpi(d1, d1.all_components(), {});
  ASSERT_EQ(all.size(), 3u + 1u + 3u);
  EXPECT_EQ(all[0], implies(atom("ok(c1)"), atom("A")));
  EXPECT_EQ(all[3], neg(atom("C")));
  EXPECT_EQ(all[4], atom("ok(c1)"));
  EXPECT_EQ(encode_dpi(d1, {}, {}).size(), 4u);

  const auto d2 = mbd::testing::dpi2();
  const auto mixed = encode_dpi(d2, ComponentSet{0}, ComponentSet{1});
  ASSERT_EQ(mixed.size(), 3u + 1u + 2u);
  EXPECT_EQ(mixed[4], atom("ok(c1)"));
  EXPECT_EQ(mixed[5], neg(atom("ok(c2)")));
  for (const auto& s : mixed) EXPECT_FALSE(s.atoms().contains("ok(c3)") && s.is_literal());
  EXPECT_THROW(encode_dpi(d2, ComponentSet{0}, ComponentSet{0}), PreconditionError);
}

TEST(CheckEntailed, Examples) {
  DpllOracle oracle;
  const auto a = atom("A"), b = atom("B");
  EXPECT_TRUE(check_entailed(oracle, S({a, implies(a, b)}), b));
  EXPECT_FALSE(check_entailed(oracle, S({disj(a, b)}), a));
  const auto d1 = mbd::testing::dpi1();
  mbd::testing::NaiveSemantics naive(d1);
  ASSERT_TRUE(naive.entails_under(ComponentSet{0}, neg(atom("C"))));
  EXPECT_TRUE(check_entailed(oracle, encode_dpi(d1, d1.all_components() - ComponentSet{0}, ComponentSet{0}), neg(atom("C"))));
}

// Random formula over `n_atoms` atoms with roughly `size` connectives.
Sentence random_formula(std::mt19937_64& rng, std::size_t n_atoms, int size) {
  if (size <= 0) {
    const auto r = rng() % (n_atoms + 1);
    if (r == n_atoms) return Sentence::constant(rng() % 2);
    return atom("v" + std::to_string(r));
  }
  const int left = static_cast<int>(rng() % size);
  switch (rng() % 6) {
    case 0: return neg(random_formula(rng, n_atoms, size - 1));
    case 1: return conj(random_formula(rng, n_atoms, left), random_formula(rng, n_atoms, size - 1 - left));
    case 2: return disj(random_formula(rng, n_atoms, left), random_formula(rng, n_atoms, size - 1 - left));
    case 3: return implies(random_formula(rng, n_atoms, left), random_formula(rng, n_atoms, size - 1 - left));
    case 4: return iff(random_formula(rng, n_atoms, left), random_formula(rng, n_atoms, size - 1 - left));
    default: return disj(atom("v" + std::to_string(rng() % n_atoms)), neg(random_formula(rng, n_atoms, size - 1)));
  }
}

TEST(BuiltInChecker, AgreesWithTruthTableOnRandomFormulas) {
  std::mt19937_64 rng(2024);
  DpllOracle dpll;
  TruthTableOracle table;
  std::size_t inconsistent = 0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t n_atoms = 1 + rng() % 16;
    std::vector<Sentence> set;
    const std::size_t n_sentences = 1 + rng() % 6;
    for (std::size_t i = 0; i < n_sentences; ++i) set.push_back(random_formula(rng, n_atoms, static_cast<int>(rng() % 8)));
    const auto expected = table.check(set);
    ASSERT_EQ(dpll.check(set), expected) << "case " << t;
    if (expected == Consistency::Inconsistent) ++inconsistent;
  }
  // both outcomes must be well represented for the comparison to mean anything
  EXPECT_GT(inconsistent, 1000u);
  EXPECT_LT(inconsistent, 9000u);
}

// Truth tables themselves are checked against direct evaluation on tiny inputs.
TEST(TruthTable, MatchesDirectEvaluation) {
  std::mt19937_64 rng(5);
  TruthTableOracle table;
  for (int t = 0; t < 500; ++t) {
    const std::size_t n_atoms = 1 + rng() % 4;
    std::vector<Sentence> set{random_formula(rng, n_atoms, 5), random_formula(rng, n_atoms, 3)};
    if (rng() % 2) set.push_back(atom("v0"));
    bool sat = false;
    for (unsigned row = 0; row < (1u << n_atoms); ++row) {
      auto v = [row](const std::string& a) { return ((row >> std::stoi(a.substr(1))) & 1U) != 0; };
      bool all = true;
      for (const auto& s : set) all = all && s.evaluate(v);
      sat = sat || all;
    }
    ASSERT_EQ(table.check(set), sat ? Consistency::Consistent : Consistency::Inconsistent);
  }
}

TEST(BuiltInChecker, InconsistencyIsMonotone) {
  std::mt19937_64 rng(99);
  DpllOracle dpll;
  for (int t = 0; t < 2000; ++t) {
    std::vector<Sentence> set{random_formula(rng, 5, 6), random_formula(rng, 5, 6)};
    if (dpll.check(set) != Consistency::Inconsistent) continue;
    set.push_back(random_formula(rng, 8, 6));
    ASSERT_EQ(dpll.check(set), Consistency::Inconsistent);
  }
}

TEST(ConsistencyOracle, CloneIsIndependent) {
  DpllOracle dpll(50);
  auto copy = dpll.clone();
  copy->check(S({atom("A")}));
  EXPECT_EQ(copy->stats().calls, 1u);
  EXPECT_EQ(dpll.stats().calls, 0u);
  EXPECT_EQ(copy->name(), "dpll");
}

}  // namespace
