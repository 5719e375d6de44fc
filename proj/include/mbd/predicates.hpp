#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mbd/component_set.hpp"
#include "mbd/dpi.hpp"
#include "mbd/error.hpp"
#include "mbd/reasoner.hpp"

namespace mbd {

struct AssumptionKey {
  std::uint64_t ok = 0;
  std::uint64_t nok = 0;
  friend bool operator==(const AssumptionKey&, const AssumptionKey&) = default;
};

struct AssumptionKeyHash {
  std::size_t operator()(const AssumptionKey& k) const noexcept {
    return std::hash<std::uint64_t>{}(k.ok * 0x9E3779B97F4A7C15ULL ^ k.nok);
  }
};

// Knowledge that survives extending MEAS: an inconsistent assumption set
// stays inconsistent when sentences are added, and so does every conflict.
struct SearchMemo {
  std::unordered_set<AssumptionKey, AssumptionKeyHash> inconsistent;
  std::vector<ComponentSet> conflicts;

  void remember_conflict(ComponentSet c) {
    if (std::find(conflicts.begin(), conflicts.end(), c) == conflicts.end()) conflicts.push_back(c);
  }
};

// Consistency of SD + OBS + MEAS under ok/nok assumptions for one DPI,
// cached by the pair of assumption sets.
class AssumptionChecker {
 public:
  AssumptionChecker(const Dpi& dpi, ConsistencyOracle& oracle, SearchMemo* memo = nullptr)
      : dpi_(dpi), oracle_(oracle), memo_(memo), all_(dpi.all_components()) {}

  bool consistent(ComponentSet ok, ComponentSet nok) {
    const AssumptionKey key{ok.bits(), nok.bits()};
    if (auto it = cache_.find(key); it != cache_.end()) {
      oracle_.record_cache_hit();
      return it->second;
    }
    if (memo_ && memo_->inconsistent.contains(key)) {
      oracle_.record_cache_hit();
      cache_.emplace(key, false);
      return false;
    }
    const auto sentences = encode_dpi(dpi_, ok, nok);
    ++oracle_calls_;
    const bool result = oracle_.consistent(sentences);
    cache_.emplace(key, result);
    if (memo_ && !result) memo_->inconsistent.insert(key);
    return result;
  }

  bool is_diagnosis(ComponentSet d) { return consistent(all_ - d, d); }
  bool is_conflict(ComponentSet c) { return !consistent(c, {}); }

  bool is_minimal_diagnosis(ComponentSet d) {
    if (!is_diagnosis(d)) return false;
    for (auto c : d) {
      if (is_diagnosis(d.without(c))) return false;
    }
    return true;
  }

  const Dpi& dpi() const noexcept { return dpi_; }
  ConsistencyOracle& oracle() noexcept { return oracle_; }
  SearchMemo* memo() noexcept { return memo_; }
  ComponentSet all() const noexcept { return all_; }
  // Checks that actually reached the oracle.
  std::size_t oracle_calls() const noexcept { return oracle_calls_; }

 private:
  const Dpi& dpi_;
  ConsistencyOracle& oracle_;
  SearchMemo* memo_;
  ComponentSet all_;
  std::unordered_map<AssumptionKey, bool, AssumptionKeyHash> cache_;
  std::size_t oracle_calls_ = 0;
};

namespace detail {
inline void require_subset(const Dpi& dpi, ComponentSet s) {
  if (!s.is_subset_of(dpi.all_components())) throw PreconditionError("component set is not a subset of COMPS");
}
}  // namespace detail

inline bool is_diagnosis(const Dpi& dpi, ComponentSet d, ConsistencyOracle& oracle) {
  detail::require_subset(dpi, d);
  return oracle.consistent(encode_dpi(dpi, dpi.all_components() - d, d));
}

inline bool is_conflict(const Dpi& dpi, ComponentSet c, ConsistencyOracle& oracle) {
  detail::require_subset(dpi, c);
  return !oracle.consistent(encode_dpi(dpi, c, {}));
}

// Removing single elements is enough: the diagnosis property is closed
// under supersets in the weak fault model.
inline bool is_minimal_diagnosis(const Dpi& dpi, ComponentSet d, ConsistencyOracle& oracle) {
  detail::require_subset(dpi, d);
  AssumptionChecker checker(dpi, oracle);
  return checker.is_minimal_diagnosis(d);
}

// is_diagnosis(x) == !is_conflict(COMPS \ x)
inline bool verify_duality(const Dpi& dpi, ComponentSet x, ConsistencyOracle& oracle) {
  detail::require_subset(dpi, x);
  return is_diagnosis(dpi, x, oracle) == !is_conflict(dpi, dpi.all_components() - x, oracle);
}

// Load-time invariant: with every component abnormal the instance must be
// satisfiable, otherwise no diagnosis exists at all.
inline void require_diagnosable(const Dpi& dpi, ConsistencyOracle& oracle) {
  if (!is_diagnosis(dpi, dpi.all_components(), oracle)) {
    throw NoDiagnosisError("background, observations and measurements are inconsistent even with every component abnormal");
  }
}

}  // namespace mbd
