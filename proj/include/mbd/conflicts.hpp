#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mbd/component_set.hpp"
#include "mbd/dpi.hpp"
#include "mbd/error.hpp"
#include "mbd/predicates.hpp"
#include "mbd/reasoner.hpp"
#include "mbd/subsets.hpp"

namespace mbd {

// Divide-and-conquer minimization in the style of QuickXplain.
//
// Given a predicate that is monotone under set inclusion, returns a
// subset-minimal X of `candidates` with holds(background | X), or nullopt
// when even holds(background | candidates) is false. Candidates are split at
// the midpoint in ascending index order; elements with lower indices are
// preferred, which makes the result deterministic.
template <class Predicate>
std::optional<ComponentSet> quick_minimize(ComponentSet background, ComponentSet candidates, Predicate&& holds) {
  if (holds(background)) return ComponentSet{};
  if (candidates.empty() || !holds(background | candidates)) return std::nullopt;

  // `added` says whether `base` grew since the caller last evaluated it.
  auto recurse = [&holds](auto& self, ComponentSet base, bool added, ComponentSet rest) -> ComponentSet {
    if (added && holds(base)) return {};
    if (rest.size() == 1) return rest;
    const auto items = rest.to_vector();
    const std::size_t mid = items.size() / 2;
    ComponentSet first;
    for (std::size_t i = 0; i < mid; ++i) first.insert(items[i]);
    const ComponentSet second = rest - first;
    const ComponentSet from_second = self(self, base | first, !first.empty(), second);
    const ComponentSet from_first = self(self, base | from_second, !from_second.empty(), first);
    return from_first | from_second;
  };
  return recurse(recurse, background, false, candidates);
}

struct ConflictRequest {
  const Dpi& dpi;
  ComponentSet candidate_scope;
};

// A minimal conflict inside `scope`, or nullopt iff `scope` itself is not a
// conflict.
inline std::optional<ComponentSet> find_minimal_conflict(AssumptionChecker& checker, ComponentSet scope) {
  if (!scope.is_subset_of(checker.all())) throw PreconditionError("conflict scope is not a subset of COMPS");
  return quick_minimize(ComponentSet{}, scope, [&checker](ComponentSet s) { return checker.is_conflict(s); });
}

inline std::optional<ComponentSet> find_minimal_conflict(const ConflictRequest& req, ConsistencyOracle& oracle) {
  AssumptionChecker checker(req.dpi, oracle);
  return find_minimal_conflict(checker, req.candidate_scope);
}

inline constexpr std::size_t kExhaustiveConflictBound = 16;

// Every minimal conflict, by enumerating subsets in canonical order and
// skipping supersets of conflicts already found (conflicts are closed under
// supersets). Returned in canonical order.
inline std::vector<ComponentSet> enumerate_minimal_conflicts(AssumptionChecker& checker,
                                                             std::size_t bound = kExhaustiveConflictBound) {
  const std::size_t n = checker.dpi().size();
  if (n > bound) {
    throw BoundExceededError("exhaustive conflict enumeration is limited to " + std::to_string(bound) + " components");
  }
  std::vector<ComponentSet> found;
  for (std::size_t k = 1; k <= n; ++k) {
    for (auto s : subsets_of_size(n, k)) {
      if (has_subset_in(s, found)) continue;
      if (checker.is_conflict(s)) found.push_back(s);
    }
  }
  return found;
}

inline std::vector<ComponentSet> enumerate_minimal_conflicts(const Dpi& dpi, ConsistencyOracle& oracle,
                                                             std::size_t bound = kExhaustiveConflictBound) {
  AssumptionChecker checker(dpi, oracle);
  return enumerate_minimal_conflicts(checker, bound);
}

}  // namespace mbd
