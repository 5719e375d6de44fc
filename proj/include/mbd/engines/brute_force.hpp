#pragma once

#include <vector>

#include "mbd/component_set.hpp"
#include "mbd/dpi.hpp"
#include "mbd/engines/result.hpp"
#include "mbd/error.hpp"
#include "mbd/predicates.hpp"
#include "mbd/reasoner.hpp"
#include "mbd/subsets.hpp"

namespace mbd {

inline constexpr std::size_t kBruteForceBound = 20;

// Reference engine: tests every subset of COMPS in canonical order and keeps
// those that are diagnoses and contain no smaller diagnosis. Supersets of
// found diagnoses are skipped without a consistency check (monotonicity).
// Each cardinality layer is materialized, which is what peak_live_nodes counts.
inline DiagnosisResult run_brute_force(const Dpi& dpi, ConsistencyOracle& oracle,
                                       const DiagnosisQuery& query = DiagnosisQuery::all()) {
  query.validate();
  const std::size_t n = dpi.size();
  if (n > kBruteForceBound) throw BoundExceededError("brute force is limited to 20 components");
  AssumptionChecker checker(dpi, oracle);
  detail::PeakCounter peak;
  DiagnosisResult result;
  const std::size_t queries_before = oracle.stats().calls + oracle.stats().cache_hits;

  for (std::size_t k = 0; k <= n && query.wants_more(result.diagnoses.size()); ++k) {
    std::vector<ComponentSet> layer = subsets_of_size(n, k);
    std::erase_if(layer, [&](ComponentSet s) { return has_subset_in(s, result.diagnoses); });
    peak.observe(layer.size() + result.diagnoses.size());
    bool hit = false;
    for (auto s : layer) {
      if (!query.wants_more(result.diagnoses.size())) break;
      ++result.stats.nodes_expanded;
      if (checker.is_diagnosis(s)) {
        result.diagnoses.push_back(s);
        hit = true;
      }
    }
    if (hit && query.property == DiagnosisProperty::MinimumCardinality) break;
  }

  result.stats.oracle_calls = checker.oracle_calls();
  result.stats.peak_live_nodes = peak.peak();
  result.stats.wall_steps = oracle.stats().calls + oracle.stats().cache_hits - queries_before + result.stats.nodes_expanded;
  return result;
}

}  // namespace mbd
