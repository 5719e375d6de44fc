#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "mbd/component_set.hpp"
#include "mbd/dpi.hpp"
#include "mbd/engines/result.hpp"
#include "mbd/predicates.hpp"
#include "mbd/reasoner.hpp"

namespace mbd {

struct GreedyOptions {
  std::size_t restarts = 8;
  std::uint64_t seed = 1;
  // Disabling the descent turns the engine into the unsound mutant used by
  // the taxonomy harness: it then returns COMPS unchanged.
  bool minimize = true;
  // Noise added to the drop order on restarts after the first, relative to
  // the (1 - p) keys.
  double perturbation = 0.5;
};

// Randomized greedy descent from COMPS. Each pass tries to drop components
// in order of decreasing (1 - p); a removal is kept whenever the rest is
// still a diagnosis. One pass already yields a minimal diagnosis because
// the diagnosis property is monotone, and a final sweep re-checks it.
// Neither complete nor ordered.
inline DiagnosisResult run_greedy_heuristic(const Dpi& dpi, const DiagnosisQuery& query, const FailureRates& rates,
                                            ConsistencyOracle& oracle, const GreedyOptions& options = {}) {
  query.validate();
  if (rates.size() != dpi.size()) throw PreconditionError("failure rates must cover every component");
  AssumptionChecker checker(dpi, oracle);
  DiagnosisResult result;
  const std::size_t queries_before = oracle.stats().calls + oracle.stats().cache_hits;
  std::mt19937_64 rng(options.seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  std::vector<ComponentIndex> order(dpi.size());
  for (std::size_t r = 0; r < std::max<std::size_t>(options.restarts, 1); ++r) {
    if (!query.wants_more(result.diagnoses.size())) break;
    std::vector<double> key(dpi.size());
    for (std::size_t c = 0; c < dpi.size(); ++c) {
      key[c] = 1.0 - rates[c];
      if (r > 0) key[c] += options.perturbation * (2.0 * unit() - 1.0);
    }
    for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
    std::stable_sort(order.begin(), order.end(), [&key](auto a, auto b) { return key[a] > key[b]; });

    ComponentSet current = checker.all();
    ++result.stats.nodes_expanded;
    if (options.minimize) {
      for (auto c : order) {
        if (current.contains(c) && checker.is_diagnosis(current.without(c))) current.erase(c);
      }
      bool shrunk = true;
      while (shrunk) {
        shrunk = false;
        for (auto c : current) {
          if (checker.is_diagnosis(current.without(c))) {
            current.erase(c);
            shrunk = true;
            break;
          }
        }
      }
    }
    if (std::find(result.diagnoses.begin(), result.diagnoses.end(), current) == result.diagnoses.end()) {
      result.diagnoses.push_back(current);
    }
  }
  if (query.property == DiagnosisProperty::MinimumCardinality && !result.diagnoses.empty()) {
    std::size_t best = result.diagnoses.front().size();
    for (auto d : result.diagnoses) best = std::min(best, d.size());
    std::erase_if(result.diagnoses, [best](ComponentSet d) { return d.size() != best; });
  }

  result.attach_probabilities(rates);
  result.stats.oracle_calls = checker.oracle_calls();
  // current candidate plus the stored results
  result.stats.peak_live_nodes = 1 + result.diagnoses.size();
  result.stats.wall_steps = oracle.stats().calls + oracle.stats().cache_hits - queries_before + result.stats.nodes_expanded;
  return result;
}

}  // namespace mbd
