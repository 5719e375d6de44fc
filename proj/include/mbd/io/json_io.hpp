#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "mbd/dpi.hpp"
#include "mbd/engines.hpp"
#include "mbd/error.hpp"

namespace mbd::io {

inline constexpr int kJsonFormatVersion = 1;

inline nlohmann::json stats_json(const RunStats& s) {
  return {{"oracle_calls", s.oracle_calls},
          {"nodes_expanded", s.nodes_expanded},
          {"peak_live_nodes", s.peak_live_nodes},
          {"wall_steps", s.wall_steps}};
}

inline nlohmann::json result_json(const Dpi& dpi, EngineId engine, const DiagnosisResult& r) {
  nlohmann::json diagnoses = nlohmann::json::array();
  for (auto d : r.diagnoses) diagnoses.push_back(dpi.set_names(d));
  nlohmann::json out = {{"format_version", kJsonFormatVersion},
                        {"dpi", dpi.name()},
                        {"engine", std::string(to_string(engine))},
                        {"diagnoses", diagnoses},
                        {"stats", stats_json(r.stats)}};
  out["probabilities"] = r.probabilities ? nlohmann::json(*r.probabilities) : nlohmann::json(nullptr);
  return out;
}

inline DiagnosisOrder parse_order(const std::string& s) {
  if (s == "cardinality") return DiagnosisOrder::Cardinality;
  if (s == "probability") return DiagnosisOrder::Probability;
  if (s == "none") return DiagnosisOrder::None;
  throw PreconditionError("unknown order '" + s + "' (cardinality, probability, none)");
}

inline std::optional<std::size_t> parse_k(const std::string& s) {
  if (s == "all") return std::nullopt;
  std::size_t pos = 0;
  unsigned long long k = 0;
  try {
    k = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty() || k == 0) throw PreconditionError("k must be a positive integer or 'all'");
  return static_cast<std::size_t>(k);
}

// One-shot diagnosis shared by the CLI and the HTTP service. Without an
// explicit order the engine's natural order is used; an explicit order the
// engine cannot honour (probability for hs_tree, say) is a query error.
inline DiagnosisResult diagnose(const Dpi& dpi, EngineId engine, std::optional<std::size_t> k,
                                std::optional<DiagnosisOrder> order, const FailureRates& rates,
                                ConsistencyOracle& oracle) {
  DiagnosisQuery q{k, DiagnosisProperty::None, order ? *order : natural_order(engine)};
  if (order == DiagnosisOrder::Probability && engine != EngineId::UcsHsTree) {
    throw QueryError(std::string(to_string(engine)) + " cannot emit in probability order; use ucs_hs_tree");
  }
  if (order == DiagnosisOrder::Cardinality && engine != EngineId::HsTree && engine != EngineId::BruteForce) {
    throw QueryError(std::string(to_string(engine)) + " does not emit in cardinality order");
  }
  return run_engine(engine, dpi, q, rates, oracle);
}

}  // namespace mbd::io
