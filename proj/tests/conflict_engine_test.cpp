#include <gtest/gtest.h>

#include <cmath>

#include "mbd/conflicts.hpp"
#include "mbd/io/corpus.hpp"
#include "support/fixtures.hpp"
#include "support/naive.hpp"

using namespace mbd;

namespace {

TEST(FindMinimalConflict, Examples) {
  DpllOracle oracle;
  const auto d2 = mbd::testing::dpi2();
  mbd::testing::NaiveSemantics naive2(d2);
  ASSERT_EQ(naive2.minimal_conflicts(), (std::set<std::uint64_t>{ComponentSet{0, 1}.bits(), ComponentSet{0, 2}.bits()}));
  EXPECT_EQ(find_minimal_conflict({d2, d2.all_components()}, oracle), (ComponentSet{0, 1}));
  EXPECT_EQ(find_minimal_conflict({d2, ComponentSet{1, 2}}, oracle), std::nullopt);

  const auto d1 = mbd::testing::dpi1();
  ASSERT_EQ(mbd::testing::NaiveSemantics(d1).minimal_conflicts(), (std::set<std::uint64_t>{d1.all_components().bits()}));
  EXPECT_EQ(find_minimal_conflict({d1, d1.all_components()}, oracle), d1.all_components());
}

TEST(FindMinimalConflict, ScopeOutsideCompsIsRejected) {
  DpllOracle oracle;
  const auto d2 = mbd::testing::dpi2();
  EXPECT_THROW(find_minimal_conflict({d2, ComponentSet{0, 9}}, oracle), PreconditionError);
}

TEST(EnumerateMinimalConflicts, Examples) {
  DpllOracle oracle;
  EXPECT_EQ(enumerate_minimal_conflicts(mbd::testing::dpi2(), oracle), (std::vector<ComponentSet>{{0, 1}, {0, 2}}));
  EXPECT_EQ(enumerate_minimal_conflicts(mbd::testing::dpi1(), oracle), (std::vector<ComponentSet>{{0, 1, 2}}));
  EXPECT_TRUE(enumerate_minimal_conflicts(mbd::testing::consistent_dpi(), oracle).empty());
}

TEST(EnumerateMinimalConflicts, BoundIsEnforced) {
  DpllOracle oracle;
  EXPECT_THROW(enumerate_minimal_conflicts(io::independent_conflicts_family(9), oracle), BoundExceededError);
}

TEST(QuickMinimize, ReturnsLowestPreferredMinimalSubset) {
  // holds(S) iff S contains {1,4} or {2}
  auto holds = [](ComponentSet s) { return ComponentSet{1, 4}.is_subset_of(s) || s.contains(2); };
  EXPECT_EQ(quick_minimize({}, ComponentSet{0, 1, 2, 3, 4}, holds), (ComponentSet{2}));
  EXPECT_EQ(quick_minimize({}, ComponentSet{0, 1, 3, 4}, holds), (ComponentSet{1, 4}));
  EXPECT_EQ(quick_minimize({}, ComponentSet{0, 1, 3}, holds), std::nullopt);
}

// Every returned conflict is minimal, lies in scope and is one of the
// brute-force minimal conflicts; oracle checks stay within
// 4 * (|C| + |C| log2(|scope| / |C|)).
TEST(FindMinimalConflict, MinimalMemberAndCallBound) {
  auto corpus = io::generate_corpus({40, 8, 16, 3});
  std::mt19937_64 rng(17);
  for (const auto& inst : corpus) {
    mbd::testing::NaiveSemantics naive(inst.dpi);
    const auto minimal = naive.minimal_conflicts();
    for (int t = 0; t < 10; ++t) {
      const auto scope = ComponentSet::from_bits(rng() & inst.dpi.all_components().bits());
      DpllOracle oracle;
      AssumptionChecker checker(inst.dpi, oracle);
      const auto found = find_minimal_conflict(checker, scope);
      const bool scope_is_conflict = naive.is_conflict(scope);
      ASSERT_EQ(found.has_value(), scope_is_conflict);
      if (!found) continue;
      ASSERT_TRUE(found->is_subset_of(scope));
      ASSERT_TRUE(minimal.contains(found->bits()));
      for (auto c : *found) ASSERT_FALSE(naive.is_conflict(found->without(c)));
      const double k = static_cast<double>(found->size());
      const double bound = 4.0 * (k + k * std::log2(static_cast<double>(scope.size()) / k));
      ASSERT_LE(static_cast<double>(checker.oracle_calls()), bound) << inst.dpi.name();
    }
  }
}

}  // namespace
