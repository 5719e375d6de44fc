#pragma once

#include <optional>
#include <vector>

#include "mbd/component_set.hpp"
#include "mbd/conflicts.hpp"
#include "mbd/dpi.hpp"
#include "mbd/engines/result.hpp"
#include "mbd/predicates.hpp"
#include "mbd/reasoner.hpp"

namespace mbd {

// A subset-minimal diagnosis inside `allowed`, found directly through the
// duality property (D is a diagnosis iff COMPS \ D is not a conflict).
// nullopt iff `allowed` is not a diagnosis, i.e. COMPS \ allowed is a conflict.
inline std::optional<ComponentSet> find_minimal_diagnosis(AssumptionChecker& checker, ComponentSet allowed) {
  return quick_minimize(ComponentSet{}, allowed, [&checker](ComponentSet d) { return checker.is_diagnosis(d); });
}

// Inverse hitting-set tree: nodes are labeled by minimal diagnoses instead of
// conflicts, and an edge c out of a node forbids c in the diagnoses below it.
// Any minimal diagnosis D' other than a node label D contains none of some
// c in D, so branching over the label's elements reaches every minimal
// diagnosis. The tree is walked depth first with one stack frame per level,
// which bounds live nodes by |COMPS| + 1; found diagnoses (at most k) are
// reused as labels wherever they avoid the forbidden set.
inline DiagnosisResult run_inv_hs_tree(const Dpi& dpi, const DiagnosisQuery& query, ConsistencyOracle& oracle) {
  query.validate();
  AssumptionChecker checker(dpi, oracle);
  detail::PeakCounter peak;
  DiagnosisResult result;
  const std::size_t queries_before = oracle.stats().calls + oracle.stats().cache_hits;
  const bool min_card = query.property == DiagnosisProperty::MinimumCardinality;

  auto label_for = [&](ComponentSet forbidden) -> std::optional<ComponentSet> {
    for (auto d : result.diagnoses) {
      if (!d.intersects(forbidden)) return d;
    }
    auto fresh = find_minimal_diagnosis(checker, checker.all() - forbidden);
    if (fresh) result.diagnoses.push_back(*fresh);
    return fresh;
  };

  struct Frame {
    ComponentSet forbidden;
    std::vector<ComponentIndex> branches;
    std::size_t next = 0;
  };
  std::vector<Frame> stack;

  ++result.stats.nodes_expanded;
  if (auto root = label_for({})) stack.push_back({ComponentSet{}, root->to_vector()});
  peak.observe(stack.size());

  // For minimum-cardinality queries the whole tree is needed to be sure the
  // smallest diagnoses were seen, so k only truncates at the end.
  auto keep_going = [&] { return min_card || query.wants_more(result.diagnoses.size()); };

  while (!stack.empty() && keep_going()) {
    Frame& top = stack.back();
    if (top.next == top.branches.size()) {
      stack.pop_back();
      continue;
    }
    const ComponentSet forbidden = top.forbidden.with(top.branches[top.next++]);
    ++result.stats.nodes_expanded;
    if (auto label = label_for(forbidden)) {
      stack.push_back({forbidden, label->to_vector()});
      peak.observe(stack.size());
    }
  }

  if (min_card && !result.diagnoses.empty()) {
    std::size_t best = result.diagnoses.front().size();
    for (auto d : result.diagnoses) best = std::min(best, d.size());
    std::erase_if(result.diagnoses, [best](ComponentSet d) { return d.size() != best; });
  }
  if (query.k && result.diagnoses.size() > *query.k) result.diagnoses.resize(*query.k);

  result.stats.oracle_calls = checker.oracle_calls();
  result.stats.peak_live_nodes = peak.peak();
  result.stats.wall_steps = oracle.stats().calls + oracle.stats().cache_hits - queries_before + result.stats.nodes_expanded;
  return result;
}

}  // namespace mbd
