#pragma once

#include <algorithm>
#include <optional>
#include <unordered_set>
#include <vector>

#include "mbd/component_set.hpp"
#include "mbd/conflicts.hpp"
#include "mbd/dpi.hpp"
#include "mbd/engines/result.hpp"
#include "mbd/predicates.hpp"
#include "mbd/reasoner.hpp"

namespace mbd {

namespace detail {

// Conflict labels for hitting-set tree nodes. A node with path H takes any
// known conflict disjoint from H (Reiter's label reuse); otherwise a fresh
// minimal conflict is extracted from COMPS \ H. No conflict there means
// COMPS \ H is consistent, i.e. H is a diagnosis.
class ConflictLabeler {
 public:
  explicit ConflictLabeler(AssumptionChecker& checker) : checker_(checker) {
    if (auto* memo = checker_.memo()) known_ = memo->conflicts;
  }

  std::optional<ComponentSet> label(ComponentSet path) {
    for (auto c : known_) {
      if (!c.intersects(path)) return c;
    }
    auto fresh = find_minimal_conflict(checker_, checker_.all() - path);
    if (fresh) {
      known_.push_back(*fresh);
      if (auto* memo = checker_.memo()) memo->remember_conflict(*fresh);
    }
    return fresh;
  }

 private:
  AssumptionChecker& checker_;
  std::vector<ComponentSet> known_;
};

}  // namespace detail

// Reiter's breadth-first hitting-set tree with on-the-fly minimal conflicts.
//
// Pruning: a node whose path contains an already found diagnosis is closed;
// paths generated twice on one level are merged (duplicate rule). The full
// HS-DAG edge merging and the label-replacement rule are not needed because
// labels come from find_minimal_conflict. Every level is processed in
// lexicographic path order, so diagnoses come out in canonical order
// (cardinality, then lexicographic) regardless of which labels were used.
inline DiagnosisResult run_hs_tree(const Dpi& dpi, const DiagnosisQuery& query, ConsistencyOracle& oracle,
                                   SearchMemo* memo = nullptr) {
  query.validate();
  if (query.order == DiagnosisOrder::Probability) throw QueryError("hs_tree orders by cardinality only");

  AssumptionChecker checker(dpi, oracle, memo);
  detail::ConflictLabeler labeler(checker);
  detail::PeakCounter peak;
  DiagnosisResult result;
  std::size_t queries_before = oracle.stats().calls + oracle.stats().cache_hits;

  std::vector<ComponentSet> level{ComponentSet{}};
  while (!level.empty() && query.wants_more(result.diagnoses.size())) {
    std::sort(level.begin(), level.end(), lex_less);
    std::unordered_set<ComponentSet, ComponentSetHash> next;
    bool level_hit = false;
    for (std::size_t i = 0; i < level.size(); ++i) {
      peak.observe(level.size() - i + next.size());
      if (!query.wants_more(result.diagnoses.size())) break;
      const ComponentSet path = level[i];
      if (has_subset_in(path, result.diagnoses)) continue;
      ++result.stats.nodes_expanded;
      const auto conflict = labeler.label(path);
      if (!conflict) {
        result.diagnoses.push_back(path);
        level_hit = true;
        continue;
      }
      for (auto c : *conflict) {
        const ComponentSet child = path.with(c);
        if (!has_subset_in(child, result.diagnoses)) next.insert(child);
      }
    }
    peak.observe(next.size());
    if (level_hit && query.property == DiagnosisProperty::MinimumCardinality) break;
    level.assign(next.begin(), next.end());
  }

  result.stats.oracle_calls = checker.oracle_calls();
  result.stats.peak_live_nodes = peak.peak();
  result.stats.wall_steps = oracle.stats().calls + oracle.stats().cache_hits - queries_before + result.stats.nodes_expanded;
  return result;
}

}  // namespace mbd
