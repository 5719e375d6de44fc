#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mbd/component_set.hpp"
#include "mbd/dpi.hpp"
#include "mbd/error.hpp"

namespace mbd {

enum class EngineId { HsTree, UcsHsTree, InvHsTree, GreedyHeuristic, BruteForce };

inline constexpr std::array<EngineId, 5> kAllEngines = {EngineId::BruteForce, EngineId::GreedyHeuristic,
                                                        EngineId::HsTree, EngineId::InvHsTree, EngineId::UcsHsTree};

inline std::string_view to_string(EngineId id) {
  switch (id) {
    case EngineId::HsTree: return "hs_tree";
    case EngineId::UcsHsTree: return "ucs_hs_tree";
    case EngineId::InvHsTree: return "inv_hs_tree";
    case EngineId::GreedyHeuristic: return "greedy_heuristic";
    case EngineId::BruteForce: return "brute_force";
  }
  return "?";
}

inline EngineId parse_engine_id(std::string_view s) {
  for (auto id : kAllEngines) {
    if (to_string(id) == s) return id;
  }
  throw PreconditionError("unknown engine '" + std::string(s) + "'");
}

struct RunStats {
  std::size_t oracle_calls = 0;
  std::size_t nodes_expanded = 0;
  // stored search nodes at the high-water mark; the memory proxy
  std::size_t peak_live_nodes = 0;
  // consistency queries (cached or not) plus node expansions
  std::size_t wall_steps = 0;
};

struct DiagnosisResult {
  std::vector<ComponentSet> diagnoses;
  std::optional<std::vector<double>> probabilities;
  RunStats stats;

  void attach_probabilities(const FailureRates& rates) {
    std::vector<double> p;
    p.reserve(diagnoses.size());
    for (auto d : diagnoses) p.push_back(diagnosis_probability(d, rates));
    probabilities = std::move(p);
  }

  std::vector<ComponentSet> sorted_set() const {
    auto out = diagnoses;
    sort_canonical(out);
    return out;
  }
};

namespace detail {

// Tracks the live-node high-water mark.
class PeakCounter {
 public:
  void observe(std::size_t live) noexcept { peak_ = std::max(peak_, live); }
  std::size_t peak() const noexcept { return peak_; }

 private:
  std::size_t peak_ = 0;
};

}  // namespace detail

}  // namespace mbd
