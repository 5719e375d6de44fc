#pragma once

#include <cstdint>
#include <functional>

#include "mbd/dpi.hpp"
#include "mbd/engines/brute_force.hpp"
#include "mbd/engines/greedy.hpp"
#include "mbd/engines/hs_tree.hpp"
#include "mbd/engines/inv_hs_tree.hpp"
#include "mbd/engines/result.hpp"
#include "mbd/engines/ucs_hs_tree.hpp"
#include "mbd/predicates.hpp"
#include "mbd/reasoner.hpp"

namespace mbd {

struct EngineParams {
  GreedyOptions greedy;
};

// Uniform entry point used by the harness, the sequential loop and the CLI.
// Minimum-cardinality queries go to hs_tree truncated after the first level
// with hits, whatever engine was asked for. Probabilities are attached
// whenever rates are available.
inline DiagnosisResult run_engine(EngineId engine, const Dpi& dpi, const DiagnosisQuery& query, const FailureRates& rates,
                                  ConsistencyOracle& oracle, const EngineParams& params = {}, SearchMemo* memo = nullptr) {
  query.validate();
  DiagnosisResult result;
  if (query.property == DiagnosisProperty::MinimumCardinality && engine != EngineId::BruteForce) {
    result = run_hs_tree(dpi, query, oracle, memo);
  } else {
    switch (engine) {
      case EngineId::HsTree: result = run_hs_tree(dpi, query, oracle, memo); break;
      case EngineId::UcsHsTree: result = run_ucs_hs_tree(dpi, query, rates, oracle, memo); break;
      case EngineId::InvHsTree: result = run_inv_hs_tree(dpi, query, oracle); break;
      case EngineId::GreedyHeuristic: result = run_greedy_heuristic(dpi, query, rates, oracle, params.greedy); break;
      case EngineId::BruteForce: result = run_brute_force(dpi, oracle, query); break;
    }
  }
  if (rates.size() == dpi.size()) result.attach_probabilities(rates);
  return result;
}

// The order an engine emits in by default.
inline DiagnosisOrder natural_order(EngineId engine) {
  switch (engine) {
    case EngineId::UcsHsTree: return DiagnosisOrder::Probability;
    case EngineId::HsTree:
    case EngineId::BruteForce: return DiagnosisOrder::Cardinality;
    default: return DiagnosisOrder::None;
  }
}

// Engine behind a callable, so the harness can run mutants through the same checks.
using EngineRunner = std::function<DiagnosisResult(const Dpi&, const DiagnosisQuery&, const FailureRates&, ConsistencyOracle&)>;

inline EngineRunner make_runner(EngineId engine, EngineParams params = {}) {
  return [engine, params](const Dpi& dpi, const DiagnosisQuery& query, const FailureRates& rates, ConsistencyOracle& oracle) {
    DiagnosisQuery q = query;
    if (q.property == DiagnosisProperty::None) q.order = natural_order(engine);
    return run_engine(engine, dpi, q, rates, oracle, params);
  };
}

}  // namespace mbd
