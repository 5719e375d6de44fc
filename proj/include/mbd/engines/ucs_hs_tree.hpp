#pragma once

#include <queue>
#include <unordered_set>
#include <vector>

#include "mbd/component_set.hpp"
#include "mbd/dpi.hpp"
#include "mbd/engines/hs_tree.hpp"
#include "mbd/engines/result.hpp"
#include "mbd/predicates.hpp"
#include "mbd/reasoner.hpp"

namespace mbd {

namespace detail {

// Largest probability any superset of `path` can have. Equals
// diagnosis_probability(path) when every rate is below one half, which is
// the plain uniform-cost case; components with p > 1/2 raise the bound so
// the priority never increases along an edge.
inline double superset_probability_bound(ComponentSet path, const FailureRates& rates) {
  double bound = diagnosis_probability(path, rates);
  for (std::size_t c = 0; c < rates.size(); ++c) {
    if (!path.contains(c) && rates[c] > 0.5) bound *= rates[c] / (1.0 - rates[c]);
  }
  return bound;
}

struct UcsItem {
  double priority;
  bool solution;
  ComponentSet path;
};

// Max-heap order: higher priority first; at equal priority open nodes come
// before solutions so that every diagnosis of that probability is known
// before one is emitted; remaining ties in canonical set order.
struct UcsItemAfter {
  bool operator()(const UcsItem& a, const UcsItem& b) const {
    if (a.priority != b.priority) return a.priority < b.priority;
    if (a.solution != b.solution) return a.solution;
    return canonical_less(b.path, a.path);
  }
};

}  // namespace detail

// Uniform-cost hitting-set tree: the frontier is ordered by the probability
// of the node's path, so minimal diagnoses come out in non-increasing
// diagnosis_probability. Conflicts are computed on the fly as in run_hs_tree.
inline DiagnosisResult run_ucs_hs_tree(const Dpi& dpi, const DiagnosisQuery& query, const FailureRates& rates,
                                       ConsistencyOracle& oracle, SearchMemo* memo = nullptr) {
  query.validate();
  if (rates.size() != dpi.size()) throw PreconditionError("failure rates must cover every component");
  if (query.property == DiagnosisProperty::MinimumCardinality) {
    throw QueryError("minimum-cardinality queries are served by hs_tree");
  }

  bool has_heavy_rate = false;
  for (double p : rates.values()) has_heavy_rate = has_heavy_rate || p >= 0.5;

  AssumptionChecker checker(dpi, oracle, memo);
  detail::ConflictLabeler labeler(checker);
  detail::PeakCounter peak;
  DiagnosisResult result;
  const std::size_t queries_before = oracle.stats().calls + oracle.stats().cache_hits;

  std::priority_queue<detail::UcsItem, std::vector<detail::UcsItem>, detail::UcsItemAfter> frontier;
  std::unordered_set<ComponentSet, ComponentSetHash> generated;
  frontier.push({detail::superset_probability_bound({}, rates), false, {}});
  generated.insert({});

  while (!frontier.empty() && query.wants_more(result.diagnoses.size())) {
    peak.observe(frontier.size());
    const detail::UcsItem item = frontier.top();
    frontier.pop();
    if (has_subset_in(item.path, result.diagnoses)) continue;

    if (item.solution) {
      // With p >= 1/2 a superset can outrank its subsets, so minimality is
      // no longer implied by the pop order and is checked explicitly.
      if (has_heavy_rate && !checker.is_minimal_diagnosis(item.path)) continue;
      result.diagnoses.push_back(item.path);
      continue;
    }

    ++result.stats.nodes_expanded;
    const auto conflict = labeler.label(item.path);
    if (!conflict) {
      frontier.push({diagnosis_probability(item.path, rates), true, item.path});
      continue;
    }
    for (auto c : *conflict) {
      const ComponentSet child = item.path.with(c);
      if (has_subset_in(child, result.diagnoses) || !generated.insert(child).second) continue;
      frontier.push({detail::superset_probability_bound(child, rates), false, child});
    }
  }
  peak.observe(frontier.size());

  result.attach_probabilities(rates);
  result.stats.oracle_calls = checker.oracle_calls();
  result.stats.peak_live_nodes = peak.peak();
  result.stats.wall_steps = oracle.stats().calls + oracle.stats().cache_hits - queries_before + result.stats.nodes_expanded;
  return result;
}

}  // namespace mbd
