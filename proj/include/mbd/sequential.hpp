#pragma once

// Sequential diagnosis: leading diagnoses -> measurement proposal -> outcome
// -> extended MEAS, repeated until one (highly probable) diagnosis is left.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "mbd/dpi.hpp"
#include "mbd/engines.hpp"
#include "mbd/error.hpp"
#include "mbd/predicates.hpp"
#include "mbd/reasoner.hpp"

namespace mbd::sequential {

enum class Mode { Stateless, Stateful };
enum class Status { Active, Done };
enum class StopReason { None, Unique, Probability, Indistinguishable };

inline std::string to_string(Mode m) { return m == Mode::Stateful ? "stateful" : "stateless"; }
inline std::string to_string(Status s) { return s == Status::Done ? "done" : "active"; }

inline std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::None: return "none";
    case StopReason::Unique: return "unique";
    case StopReason::Probability: return "probability";
    case StopReason::Indistinguishable: return "indistinguishable";
  }
  return "?";
}

inline Mode parse_mode(const std::string& s) {
  if (s == "stateless") return Mode::Stateless;
  if (s == "stateful") return Mode::Stateful;
  throw PreconditionError("unknown session mode '" + s + "' (stateless, stateful)");
}

inline constexpr std::size_t kDefaultLeadingK = 6;
inline constexpr double kDefaultStopProbability = 0.95;
inline constexpr int kTranscriptFormatVersion = 1;

struct SessionConfig {
  EngineId engine = EngineId::HsTree;
  std::size_t leading_k = kDefaultLeadingK;
  // Stop once the best leading diagnosis holds this share of the leading
  // probability mass; nullopt stops only when one diagnosis is left.
  std::optional<double> stop_probability = kDefaultStopProbability;
  Mode mode = Mode::Stateless;
  EngineParams params;
};

struct MeasurementQuery {
  std::uint64_t id = 0;
  std::string atom;
  Sentence proposition = Sentence::constant(true);
  // over the leading diagnoses: proposition entailed / negation entailed / neither
  std::vector<ComponentSet> yes, no, undecided;
  // shares of the leading probability mass
  double p_yes = 0.0;
  double p_no = 0.0;
};

struct HistoryEntry {
  MeasurementQuery query;
  bool answer = false;
};

struct Session {
  Dpi dpi;
  FailureRates rates;
  SessionConfig config;
  // grows when no query splits the current leading set
  std::size_t current_k = kDefaultLeadingK;
  std::vector<ComponentSet> leading;
  std::vector<double> probabilities;
  std::vector<HistoryEntry> history;
  std::optional<MeasurementQuery> pending;
  std::set<std::string> skipped;
  Status status = Status::Active;
  StopReason reason = StopReason::None;
  std::optional<ComponentSet> final_diagnosis;
  // stateful mode only; never shared between sessions that may diverge
  std::shared_ptr<SearchMemo> memo;
  std::vector<std::string> transcript;
  std::uint64_t next_query_id = 1;
};

namespace detail {

inline nlohmann::json set_json(const Dpi& dpi, ComponentSet s) { return dpi.set_names(s); }

inline nlohmann::json sets_json(const Dpi& dpi, const std::vector<ComponentSet>& sets) {
  nlohmann::json out = nlohmann::json::array();
  for (auto s : sets) out.push_back(set_json(dpi, s));
  return out;
}

inline double leading_mass(const Session& s) {
  double total = 0.0;
  for (double p : s.probabilities) total += p;
  return total;
}

inline void record(Session& s, nlohmann::json event) {
  event["format_version"] = kTranscriptFormatVersion;
  s.transcript.push_back(event.dump());
}

inline nlohmann::json leading_json(const Session& s) {
  nlohmann::json out = nlohmann::json::array();
  const double total = leading_mass(s);
  for (std::size_t i = 0; i < s.leading.size(); ++i) {
    out.push_back({{"diagnosis", set_json(s.dpi, s.leading[i])},
                   {"probability", s.probabilities[i]},
                   {"normalized", total > 0 ? s.probabilities[i] / total : 0.0}});
  }
  return out;
}

inline bool memo_applies(const Session& s) {
  return s.config.mode == Mode::Stateful &&
         (s.config.engine == EngineId::HsTree || s.config.engine == EngineId::UcsHsTree);
}

// Phase 1. Stateful sessions hand their memo (minimal conflicts and known
// inconsistent assumption sets) to the engine. Both stay valid as MEAS grows:
// adding sentences never makes an inconsistent set consistent, so nothing
// needs invalidating, only the search tree is rebuilt over cheaper checks.
inline void compute_leading(Session& s, ConsistencyOracle& oracle) {
  DiagnosisQuery q = DiagnosisQuery::first(s.current_k, natural_order(s.config.engine));
  auto result = run_engine(s.config.engine, s.dpi, q, s.rates, oracle, s.config.params,
                           memo_applies(s) ? s.memo.get() : nullptr);
  s.leading = std::move(result.diagnoses);
  s.probabilities.clear();
  for (auto d : s.leading) s.probabilities.push_back(diagnosis_probability(d, s.rates));

  std::size_t best = 0;
  for (std::size_t i = 1; i < s.leading.size(); ++i) {
    if (s.probabilities[i] > s.probabilities[best] ||
        (s.probabilities[i] == s.probabilities[best] && canonical_less(s.leading[i], s.leading[best]))) {
      best = i;
    }
  }
  if (s.leading.empty()) throw NoDiagnosisError("no diagnosis left");
  s.final_diagnosis.reset();
  s.status = Status::Active;
  s.reason = StopReason::None;
  if (s.leading.size() == 1) {
    s.status = Status::Done;
    s.reason = StopReason::Unique;
  } else if (s.config.stop_probability && s.probabilities[best] / leading_mass(s) >= *s.config.stop_probability) {
    s.status = Status::Done;
    s.reason = StopReason::Probability;
  }
  if (s.status == Status::Done) s.final_diagnosis = s.leading[best];
  record(s, {{"event", "leading"}, {"step", s.history.size()}, {"k", s.current_k}, {"leading", leading_json(s)}});
  if (s.status == Status::Done) {
    record(s, {{"event", "done"},
               {"final", set_json(s.dpi, *s.final_diagnosis)},
               {"measurements", s.history.size()},
               {"reason", to_string(s.reason)}});
  }
}

inline void finish_indistinguishable(Session& s) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.leading.size(); ++i) {
    if (s.probabilities[i] > s.probabilities[best]) best = i;
  }
  s.status = Status::Done;
  s.reason = StopReason::Indistinguishable;
  s.final_diagnosis = s.leading[best];
  record(s, {{"event", "done"},
             {"final", set_json(s.dpi, *s.final_diagnosis)},
             {"measurements", s.history.size()},
             {"reason", to_string(s.reason)},
             {"remaining", sets_json(s.dpi, s.leading)}});
}

}  // namespace detail

inline Session start_session(Dpi dpi, FailureRates rates, SessionConfig config, ConsistencyOracle& oracle) {
  if (config.leading_k < 2) throw PreconditionError("leading_k must be at least 2");
  if (rates.size() != dpi.size()) throw PreconditionError("failure rates must cover every component");
  if (config.stop_probability && !(*config.stop_probability > 0.0 && *config.stop_probability <= 1.0)) {
    throw PreconditionError("stop probability must lie in (0,1]");
  }
  require_diagnosable(dpi, oracle);
  Session s{std::move(dpi), std::move(rates), config};
  s.current_k = config.leading_k;
  if (config.mode == Mode::Stateful) s.memo = std::make_shared<SearchMemo>();
  detail::record(s, {{"event", "start"},
                     {"dpi", s.dpi.name()},
                     {"components", s.dpi.set_names(s.dpi.all_components())},
                     {"engine", std::string(to_string(config.engine))},
                     {"mode", to_string(config.mode)},
                     {"leading_k", config.leading_k}});
  detail::compute_leading(s, oracle);
  return s;
}

// Phase 2: the atom whose yes/no outcome splits the leading probability mass
// most evenly. An atom is a candidate when at least one leading diagnosis
// predicts its value and the predictions are not unanimous. Ties go to the
// smaller atom name.
inline MeasurementQuery propose_measurement(Session& s, ConsistencyOracle& oracle) {
  if (s.status != Status::Active) throw PreconditionError("session is done");
  if (s.leading.size() < 2) throw PreconditionError("need at least two leading diagnoses");
  if (s.pending) return *s.pending;

  std::vector<std::vector<Sentence>> theories;
  for (auto d : s.leading) theories.push_back(encode_dpi(s.dpi, s.dpi.all_components() - d, d));
  const double total = detail::leading_mass(s);
  const std::size_t n = s.leading.size();

  std::optional<MeasurementQuery> best;
  double best_gap = 0.0;
  for (const auto& name : s.dpi.vocabulary()) {
    if (s.skipped.contains(name)) continue;
    const Sentence a = atom(name);
    MeasurementQuery q;
    q.atom = name;
    q.proposition = a;
    for (std::size_t i = 0; i < n; ++i) {
      if (check_entailed(oracle, theories[i], a)) {
        q.yes.push_back(s.leading[i]);
        q.p_yes += s.probabilities[i] / total;
      } else if (check_entailed(oracle, theories[i], neg(a))) {
        q.no.push_back(s.leading[i]);
        q.p_no += s.probabilities[i] / total;
      } else {
        q.undecided.push_back(s.leading[i]);
      }
    }
    if (q.yes.size() == n || q.no.size() == n || q.yes.size() + q.no.size() == 0) continue;
    const double gap = std::fabs(q.p_yes - q.p_no);
    if (!best || gap < best_gap) {
      best = std::move(q);
      best_gap = gap;
    }
  }
  if (!best) throw NoDiscriminatingMeasurementError("no measurement discriminates the leading diagnoses");
  best->id = s.next_query_id++;
  s.pending = *best;
  detail::record(s, {{"event", "query"},
                     {"step", s.history.size() + 1},
                     {"atom", best->atom},
                     {"proposition", best->proposition.to_string()},
                     {"partition",
                      {{"yes", detail::sets_json(s.dpi, best->yes)},
                       {"no", detail::sets_json(s.dpi, best->no)},
                       {"undecided", detail::sets_json(s.dpi, best->undecided)}}},
                     {"p_yes", best->p_yes},
                     {"p_no", best->p_no}});
  return *best;
}

// Proposes the next query, widening the leading set when the current one
// cannot be split. nullopt once the session is done; a session whose
// remaining minimal diagnoses no measurement can separate ends as
// indistinguishable.
inline std::optional<MeasurementQuery> next_query(Session& s, ConsistencyOracle& oracle) {
  while (s.status == Status::Active) {
    try {
      return propose_measurement(s, oracle);
    } catch (const NoDiscriminatingMeasurementError&) {
      if (s.leading.size() < s.current_k) {
        detail::finish_indistinguishable(s);
        return std::nullopt;
      }
      s.current_k *= 2;
      detail::compute_leading(s, oracle);
    }
  }
  return std::nullopt;
}

namespace detail {

inline Session take_pending(const Session& s, const MeasurementQuery& q) {
  if (s.status != Status::Active) throw StaleQueryError("session is done");
  if (!s.pending || s.pending->id != q.id) throw StaleQueryError("query " + std::to_string(q.id) + " is not pending");
  Session next = s;
  next.pending.reset();
  if (next.memo) next.memo = std::make_shared<SearchMemo>(*next.memo);
  return next;
}

}  // namespace detail

// Phases 3 and 4: record the outcome, extend MEAS, recompute leading diagnoses.
inline Session ingest_answer(const Session& s, const MeasurementQuery& q, bool answer, ConsistencyOracle& oracle) {
  Session next = detail::take_pending(s, q);
  const Sentence m = answer ? q.proposition : neg(q.proposition);
  Dpi extended = next.dpi.with_measurement(m);
  if (!is_diagnosis(extended, extended.all_components(), oracle)) {
    throw InconsistentAnswerError("answer '" + m.to_string() + "' leaves no diagnosis");
  }
  next.dpi = std::move(extended);
  next.history.push_back({q, answer});
  detail::record(next, {{"event", "answer"}, {"step", next.history.size()}, {"atom", q.atom}, {"answer", answer}});
  detail::record(next, {{"event", "update"},
                        {"step", next.history.size()},
                        {"measurement", m.to_string()},
                        {"meas_count", next.dpi.meas().size()}});
  detail::compute_leading(next, oracle);
  return next;
}

// The oracle cannot measure this atom; it is excluded from later proposals.
inline Session skip_query(const Session& s, const MeasurementQuery& q) {
  Session next = detail::take_pending(s, q);
  next.skipped.insert(q.atom);
  detail::record(next, {{"event", "skip"}, {"step", next.history.size() + 1}, {"atom", q.atom}});
  return next;
}

inline std::string transcript_text(const Session& s) {
  std::string out;
  for (const auto& line : s.transcript) out += line + "\n";
  return out;
}

inline nlohmann::json query_json(const Session& s, const MeasurementQuery& q) {
  return {{"id", q.id},
          {"atom", q.atom},
          {"proposition", q.proposition.to_string()},
          {"partition",
           {{"yes", detail::sets_json(s.dpi, q.yes)},
            {"no", detail::sets_json(s.dpi, q.no)},
            {"undecided", detail::sets_json(s.dpi, q.undecided)}}},
          {"partition_sizes", {q.yes.size(), q.no.size(), q.undecided.size()}},
          {"p_yes", q.p_yes},
          {"p_no", q.p_no}};
}

inline nlohmann::json state_json(const Session& s) {
  nlohmann::json meas = nlohmann::json::array();
  for (const auto& m : s.dpi.meas()) meas.push_back(m.to_string());
  nlohmann::json history = nlohmann::json::array();
  for (const auto& h : s.history) history.push_back({{"atom", h.query.atom}, {"answer", h.answer}});
  nlohmann::json out = {{"format_version", kTranscriptFormatVersion},
                        {"dpi", s.dpi.name()},
                        {"engine", std::string(to_string(s.config.engine))},
                        {"mode", to_string(s.config.mode)},
                        {"leading_k", s.config.leading_k},
                        {"status", to_string(s.status)},
                        {"reason", to_string(s.reason)},
                        {"leading", detail::leading_json(s)},
                        {"meas", meas},
                        {"history", history}};
  out["final"] = s.final_diagnosis ? detail::set_json(s.dpi, *s.final_diagnosis) : nlohmann::json(nullptr);
  out["pending"] = s.pending ? query_json(s, *s.pending) : nlohmann::json(nullptr);
  return out;
}

// Answers from the actual system: a world in which exactly `ground_truth`
// is faulty. When that theory leaves the atom open, the answer is true if
// true is still possible, so successive answers never contradict each other.
class SimulatedOracle {
 public:
  explicit SimulatedOracle(ComponentSet ground_truth) : ground_truth_(ground_truth) {}

  bool answer(const Session& s, const MeasurementQuery& q, ConsistencyOracle& oracle) const {
    auto theory = encode_dpi(s.dpi, s.dpi.all_components() - ground_truth_, ground_truth_);
    theory.push_back(q.proposition);
    return oracle.consistent(theory);
  }

  ComponentSet ground_truth() const { return ground_truth_; }

 private:
  ComponentSet ground_truth_;
};

// Runs the loop with simulated answers until the session is done. Every
// measurement fixes one atom for all remaining diagnoses, so the loop ends
// after at most |vocabulary| measurements.
inline Session run_simulated_session(const Dpi& dpi, ComponentSet ground_truth, EngineId engine, const FailureRates& rates,
                                     ConsistencyOracle& oracle, SessionConfig config = {}) {
  if (!is_minimal_diagnosis(dpi, ground_truth, oracle)) {
    throw PreconditionError("ground truth " + dpi.set_to_string(ground_truth) + " is not a minimal diagnosis");
  }
  config.engine = engine;
  SimulatedOracle world(ground_truth);
  Session s = start_session(dpi, rates, config, oracle);
  const std::size_t limit = dpi.vocabulary().size();
  while (auto q = next_query(s, oracle)) {
    if (s.history.size() >= limit) throw Error("simulated session exceeded the measurement bound");
    s = ingest_answer(s, *q, world.answer(s, *q, oracle), oracle);
  }
  return s;
}

}  // namespace mbd::sequential
