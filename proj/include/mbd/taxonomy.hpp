#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "mbd/dpi.hpp"
#include "mbd/engines.hpp"
#include "mbd/error.hpp"
#include "mbd/io/corpus.hpp"
#include "mbd/reasoner.hpp"

namespace mbd::taxonomy {

enum class Soundness { Sound, Unsound };
enum class Completeness { All, Property, One, Incomplete };
enum class BestFirst { General, Focused, OnlyBest, BestSubsetNoOrder, Heuristic, Any };
enum class OutputType { Multiple, Single };
enum class ConflictDependency { ConflictDependent, Direct, CompilationBased };
enum class ConflictMode { Preliminary, OnTheFly, NotApplicable };
enum class SequentialUse { Sequential, OneShot };
enum class StateUse { Stateful, Stateless };
enum class Applicability { General, ProblemDependent };
enum class Reasoning { BlackBox, ReasonerDependent, NotApplicable };
enum class Logic { Agnostic, Dependent };
enum class Space { Poly, Exponential, Unknown };

NLOHMANN_JSON_SERIALIZE_ENUM(Soundness, {{Soundness::Sound, "sound"}, {Soundness::Unsound, "unsound"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Completeness, {{Completeness::All, "all"},
                                            {Completeness::Property, "property"},
                                            {Completeness::One, "one"},
                                            {Completeness::Incomplete, "incomplete"}})
NLOHMANN_JSON_SERIALIZE_ENUM(BestFirst, {{BestFirst::General, "general"},
                                         {BestFirst::Focused, "focused"},
                                         {BestFirst::OnlyBest, "only_best"},
                                         {BestFirst::BestSubsetNoOrder, "best_subset_no_order"},
                                         {BestFirst::Heuristic, "heuristic"},
                                         {BestFirst::Any, "any"}})
NLOHMANN_JSON_SERIALIZE_ENUM(OutputType, {{OutputType::Multiple, "multiple"}, {OutputType::Single, "single"}})
NLOHMANN_JSON_SERIALIZE_ENUM(ConflictDependency, {{ConflictDependency::ConflictDependent, "conflict_dependent"},
                                                  {ConflictDependency::Direct, "direct"},
                                                  {ConflictDependency::CompilationBased, "compilation_based"}})
NLOHMANN_JSON_SERIALIZE_ENUM(ConflictMode, {{ConflictMode::Preliminary, "preliminary"},
                                            {ConflictMode::OnTheFly, "on_the_fly"},
                                            {ConflictMode::NotApplicable, "not_applicable"}})
NLOHMANN_JSON_SERIALIZE_ENUM(SequentialUse, {{SequentialUse::Sequential, "sequential"}, {SequentialUse::OneShot, "one_shot"}})
NLOHMANN_JSON_SERIALIZE_ENUM(StateUse, {{StateUse::Stateful, "stateful"}, {StateUse::Stateless, "stateless"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Applicability, {{Applicability::General, "general"},
                                             {Applicability::ProblemDependent, "problem_dependent"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Reasoning, {{Reasoning::BlackBox, "black_box"},
                                         {Reasoning::ReasonerDependent, "reasoner_dependent"},
                                         {Reasoning::NotApplicable, "not_applicable"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Logic, {{Logic::Agnostic, "agnostic"}, {Logic::Dependent, "dependent"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Space, {{Space::Poly, "poly"}, {Space::Exponential, "exponential"}, {Space::Unknown, "unknown"}})

// `property` qualifies completeness (property/one), best_first
// (focused/only_best/best_subset_no_order), conflict_dependency
// (compilation target) and logic (the logic depended on); empty otherwise.
struct FeatureVector {
  Soundness soundness = Soundness::Sound;
  Completeness completeness = Completeness::All;
  std::string completeness_property;
  BestFirst best_first = BestFirst::Any;
  std::string best_first_property;
  OutputType output_type = OutputType::Multiple;
  ConflictDependency conflict_dependency = ConflictDependency::ConflictDependent;
  std::string compilation_target;
  ConflictMode conflict_mode = ConflictMode::OnTheFly;
  SequentialUse sequential = SequentialUse::OneShot;
  StateUse state = StateUse::Stateless;
  Applicability applicability = Applicability::General;
  Reasoning reasoning = Reasoning::BlackBox;
  Logic logic = Logic::Agnostic;
  std::string logic_name;
  Space space = Space::Exponential;

  bool operator==(const FeatureVector&) const = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FeatureVector, soundness, completeness, completeness_property, best_first,
                                   best_first_property, output_type, conflict_dependency, compilation_target,
                                   conflict_mode, sequential, state, applicability, reasoning, logic, logic_name, space)

enum class Feature {
  Soundness,
  Completeness,
  BestFirst,
  OutputType,
  ConflictDependency,
  ConflictMode,
  Sequential,
  State,
  Applicability,
  Reasoning,
  Logic,
  Space
};

inline constexpr std::size_t kFeatureCount = 12;

inline constexpr std::array<const char*, kFeatureCount> kColumnNames = {
    "SOUND", "COMPL", "BEST-F", "MULT-SOL", "CONF-DEP", "O-T-FLY", "SEQ", "STATE", "GEN-APPL", "BL-BOX-REAS", "ANY-LOGIC",
    "POLY-SPACE"};

inline constexpr std::array<const char*, kFeatureCount> kFeatureKeys = {
    "soundness",  "completeness", "best_first",    "output_type", "conflict_dependency", "conflict_mode",
    "sequential", "state",        "applicability", "reasoning",   "logic",               "space"};

inline bool is_behavioral(Feature f) {
  return f == Feature::Soundness || f == Feature::Completeness || f == Feature::BestFirst ||
         f == Feature::OutputType || f == Feature::Space;
}

// Cell text in the notation of the reference classification table:
// yes / no, with qualifiers in parentheses, na for not applicable.
inline std::string cell_text(const FeatureVector& v, Feature f) {
  auto q = [](const char* base, const std::string& p) { return p.empty() ? std::string(base) : std::string(base) + "=" + p; };
  switch (f) {
    case Feature::Soundness: return v.soundness == Soundness::Sound ? "yes" : "no";
    case Feature::Completeness:
      switch (v.completeness) {
        case Completeness::All: return "yes(all)";
        case Completeness::Property: return "yes(" + q("p", v.completeness_property) + ")";
        case Completeness::One: return "yes(" + q("one", v.completeness_property) + ")";
        case Completeness::Incomplete: return "no";
      }
      break;
    case Feature::BestFirst:
      switch (v.best_first) {
        case BestFirst::General: return "yes(gen)";
        case BestFirst::Focused: return "yes(" + q("foc", v.best_first_property) + ")";
        case BestFirst::OnlyBest: return "yes(" + q("only", v.best_first_property) + ")";
        case BestFirst::BestSubsetNoOrder: return "yes(" + q("bsno", v.best_first_property) + ")";
        case BestFirst::Heuristic: return "no(heur)";
        case BestFirst::Any: return "no";
      }
      break;
    case Feature::OutputType: return v.output_type == OutputType::Multiple ? "yes" : "no";
    case Feature::ConflictDependency:
      switch (v.conflict_dependency) {
        case ConflictDependency::ConflictDependent: return "yes";
        case ConflictDependency::Direct: return "no(dir)";
        case ConflictDependency::CompilationBased: return "no(" + q("cp-b", v.compilation_target) + ")";
      }
      break;
    case Feature::ConflictMode:
      switch (v.conflict_mode) {
        case ConflictMode::OnTheFly: return "yes";
        case ConflictMode::Preliminary: return "no";
        case ConflictMode::NotApplicable: return "na";
      }
      break;
    case Feature::Sequential: return v.sequential == SequentialUse::Sequential ? "yes" : "no";
    case Feature::State: return v.state == StateUse::Stateful ? "yes" : "no";
    case Feature::Applicability: return v.applicability == Applicability::General ? "yes" : "no";
    case Feature::Reasoning:
      switch (v.reasoning) {
        case Reasoning::BlackBox: return "yes";
        case Reasoning::ReasonerDependent: return "no";
        case Reasoning::NotApplicable: return "na";
      }
      break;
    case Feature::Logic: return v.logic == Logic::Agnostic ? "yes" : v.logic_name.empty() ? "no" : "no(" + v.logic_name + ")";
    case Feature::Space:
      switch (v.space) {
        case Space::Poly: return "yes";
        case Space::Exponential: return "no";
        case Space::Unknown: return "?";
      }
      break;
  }
  return "?";
}

inline FeatureVector claimed_vector(EngineId engine) {
  FeatureVector v;
  switch (engine) {
    case EngineId::HsTree:
      v.best_first = BestFirst::Focused;
      v.best_first_property = "mc";
      return v;
    case EngineId::UcsHsTree:
      v.best_first = BestFirst::General;
      return v;
    case EngineId::InvHsTree:
      v.best_first = BestFirst::Any;
      v.conflict_dependency = ConflictDependency::Direct;
      v.conflict_mode = ConflictMode::NotApplicable;
      v.sequential = SequentialUse::Sequential;
      v.space = Space::Poly;
      return v;
    case EngineId::GreedyHeuristic:
      v.completeness = Completeness::Incomplete;
      v.best_first = BestFirst::Heuristic;
      v.conflict_dependency = ConflictDependency::Direct;
      v.conflict_mode = ConflictMode::NotApplicable;
      v.space = Space::Poly;
      return v;
    case EngineId::BruteForce:
      // emits in cardinality order, tests candidates directly
      v.best_first = BestFirst::Focused;
      v.best_first_property = "mc";
      v.conflict_dependency = ConflictDependency::Direct;
      v.conflict_mode = ConflictMode::NotApplicable;
      return v;
  }
  throw PreconditionError("unknown engine id");
}

enum class Outcome { Pass, Fail, Untestable };
NLOHMANN_JSON_SERIALIZE_ENUM(Outcome, {{Outcome::Pass, "pass"}, {Outcome::Fail, "fail"}, {Outcome::Untestable, "untestable"}})

// Pass means the observed behavior agrees with the claimed manifestation.
struct Evidence {
  Outcome outcome = Outcome::Untestable;
  std::string detail;

  bool operator==(const Evidence&) const = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Evidence, outcome, detail)

inline Evidence pass(std::string detail) { return {Outcome::Pass, std::move(detail)}; }
inline Evidence fail(std::string detail) { return {Outcome::Fail, std::move(detail)}; }
inline Evidence untestable(std::string reason) { return {Outcome::Untestable, std::move(reason)}; }

inline std::string outcome_mark(const Evidence& e) {
  switch (e.outcome) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    case Outcome::Untestable: return "untestable";
  }
  return "?";
}

// Instances plus their brute-force minimal diagnoses, computed once.
struct CheckCorpus {
  std::vector<io::CorpusInstance> instances;
  std::vector<std::vector<ComponentSet>> truth;
  std::string description;
};

using OracleFactory = std::function<std::unique_ptr<ConsistencyOracle>()>;

inline OracleFactory default_oracle() {
  return [] { return std::unique_ptr<ConsistencyOracle>(std::make_unique<DpllOracle>()); };
}

namespace detail {

// Runs fn(i) for every i in [0, n) over `threads` workers. fn writes only to
// its own slot, so collecting results afterwards needs no locking.
inline void for_each_index(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline std::size_t default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

inline std::string set_list(const Dpi& dpi, const std::vector<ComponentSet>& sets) {
  std::string out = "[";
  for (std::size_t i = 0; i < sets.size(); ++i) out += (i ? ", " : "") + dpi.set_to_string(sets[i]);
  return out + "]";
}

// First failing instance, or nullopt if every instance is fine.
using InstanceCheck = std::function<std::optional<std::string>(std::size_t)>;

inline std::optional<std::string> first_failure(std::size_t n, std::size_t threads, const InstanceCheck& check) {
  std::vector<std::optional<std::string>> found(n);
  for_each_index(n, threads, [&](std::size_t i) { found[i] = check(i); });
  for (auto& f : found) {
    if (f) return f;
  }
  return std::nullopt;
}

}  // namespace detail

inline CheckCorpus make_check_corpus(std::vector<io::CorpusInstance> instances, std::string description,
                                     std::size_t threads = detail::default_threads()) {
  CheckCorpus corpus;
  corpus.instances = std::move(instances);
  corpus.description = std::move(description);
  corpus.truth.resize(corpus.instances.size());
  detail::for_each_index(corpus.instances.size(), threads, [&](std::size_t i) {
    DpllOracle oracle;
    corpus.truth[i] = run_brute_force(corpus.instances[i].dpi, oracle).diagnoses;
  });
  return corpus;
}

inline CheckCorpus prepare_corpus(const io::CorpusSpec& spec, std::size_t threads = detail::default_threads()) {
  std::ostringstream d;
  d << spec.count << " generated instances, " << spec.n_components << " components, clause budget "
    << spec.clause_budget << ", seed " << spec.seed << "; completeness certified only up to this size";
  return make_check_corpus(io::generate_corpus(spec), d.str(), threads);
}

struct CheckOptions {
  OracleFactory oracle = default_oracle();
  std::size_t threads = detail::default_threads();
};

// Every output of every run is a brute-force minimal diagnosis, without duplicates.
inline Evidence check_soundness(const EngineRunner& run, const FeatureVector& claim, const CheckCorpus& corpus,
                                const CheckOptions& options = {}) {
  const auto bad = detail::first_failure(corpus.instances.size(), options.threads, [&](std::size_t i) -> std::optional<std::string> {
    const auto& inst = corpus.instances[i];
    auto oracle = options.oracle();
    const auto out = run(inst.dpi, DiagnosisQuery::all(), inst.rates, *oracle).diagnoses;
    const auto& truth = corpus.truth[i];
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (std::find(truth.begin(), truth.end(), out[j]) == truth.end()) {
        return inst.dpi.name() + ": " + inst.dpi.set_to_string(out[j]) + " is not a minimal diagnosis";
      }
      if (std::find(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(j), out[j]) != out.begin() + static_cast<std::ptrdiff_t>(j)) {
        return inst.dpi.name() + ": " + inst.dpi.set_to_string(out[j]) + " emitted twice";
      }
    }
    return std::nullopt;
  });
  const std::string n = std::to_string(corpus.instances.size());
  if (claim.soundness == Soundness::Sound) {
    return bad ? fail("claimed sound; " + *bad) : pass("all outputs minimal on " + n + " instances");
  }
  return bad ? pass("claimed unsound; " + *bad) : fail("claimed unsound but no non-minimal output on " + n + " instances");
}

// k=all runs against the brute-force set.
inline Evidence check_completeness(const EngineRunner& run, const FeatureVector& claim, const CheckCorpus& corpus,
                                   const CheckOptions& options = {}) {
  const auto missing = detail::first_failure(corpus.instances.size(), options.threads, [&](std::size_t i) -> std::optional<std::string> {
    const auto& inst = corpus.instances[i];
    auto oracle = options.oracle();
    auto out = run(inst.dpi, DiagnosisQuery::all(), inst.rates, *oracle).diagnoses;
    sort_canonical(out);
    if (out == corpus.truth[i]) return std::nullopt;
    return inst.dpi.name() + ": got " + detail::set_list(inst.dpi, out) + ", expected " +
           detail::set_list(inst.dpi, corpus.truth[i]);
  });
  const std::string n = std::to_string(corpus.instances.size());
  switch (claim.completeness) {
    case Completeness::All:
      return missing ? fail("claimed all-complete; " + *missing) : pass("set-equal to brute force on " + n + " instances");
    case Completeness::Incomplete:
      return missing ? pass("claimed incomplete; counterexample " + *missing)
                     : fail("claimed incomplete but complete on all " + n + " instances");
    default: return untestable("property/one completeness has no implemented check");
  }
}

// Emission order under the claimed criterion.
inline Evidence check_best_first(const EngineRunner& run, const FeatureVector& claim, const CheckCorpus& corpus,
                                 const CheckOptions& options = {}) {
  const bool by_cardinality = claim.best_first == BestFirst::Focused && claim.best_first_property == "mc";
  const bool by_probability = claim.best_first == BestFirst::General;
  if (claim.best_first == BestFirst::Any || claim.best_first == BestFirst::Heuristic) {
    return pass("order-free claim; nothing asserted about emission order");
  }
  if (!by_cardinality && !by_probability) return untestable("no check for this best-first manifestation");
  const auto bad = detail::first_failure(corpus.instances.size(), options.threads, [&](std::size_t i) -> std::optional<std::string> {
    const auto& inst = corpus.instances[i];
    auto oracle = options.oracle();
    const auto out = run(inst.dpi, DiagnosisQuery::all(), inst.rates, *oracle).diagnoses;
    for (std::size_t j = 1; j < out.size(); ++j) {
      const bool ok = by_cardinality ? out[j - 1].size() <= out[j].size()
                                     : diagnosis_probability(out[j - 1], inst.rates) >= diagnosis_probability(out[j], inst.rates);
      if (!ok) {
        return inst.dpi.name() + ": " + inst.dpi.set_to_string(out[j - 1]) + " emitted before " +
               inst.dpi.set_to_string(out[j]);
      }
    }
    return std::nullopt;
  });
  const std::string what = by_cardinality ? "non-decreasing cardinality" : "non-increasing probability";
  return bad ? fail("order violated; " + *bad) : pass(what + " on " + std::to_string(corpus.instances.size()) + " instances");
}

// Multiple-solution engines return up to k >= 2 distinct diagnoses and do
// return more than one somewhere; single-solution engines never do.
inline Evidence check_output_type(const EngineRunner& run, const FeatureVector& claim, const CheckCorpus& corpus,
                                  const CheckOptions& options = {}) {
  constexpr std::size_t k = 3;
  std::vector<std::size_t> counts(corpus.instances.size());
  std::vector<std::optional<std::string>> errors(corpus.instances.size());
  detail::for_each_index(corpus.instances.size(), options.threads, [&](std::size_t i) {
    const auto& inst = corpus.instances[i];
    auto oracle = options.oracle();
    auto out = run(inst.dpi, DiagnosisQuery::first(k), inst.rates, *oracle).diagnoses;
    counts[i] = out.size();
    sort_canonical(out);
    if (out.size() > k) errors[i] = inst.dpi.name() + ": more than k=3 results";
    if (std::adjacent_find(out.begin(), out.end()) != out.end()) errors[i] = inst.dpi.name() + ": duplicate results";
  });
  for (auto& e : errors) {
    if (e) return fail(*e);
  }
  const std::size_t multi = static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c >= 2; }));
  const std::string n = std::to_string(corpus.instances.size());
  if (claim.output_type == OutputType::Multiple) {
    return multi > 0 ? pass("k=3 gave >= 2 distinct diagnoses on " + std::to_string(multi) + " of " + n + " instances")
                     : fail("never more than one diagnosis with k=3");
  }
  return multi == 0 ? pass("at most one diagnosis on every instance") : fail("claimed single-solution but returned several");
}

struct SpaceSpec {
  std::size_t m_min = 4;
  std::size_t m_max = 8;
  std::size_t c = 4;
  std::vector<std::size_t> ks{1, 2, 3};
};

// Live-node surrogate on the independent-conflicts family (2^m minimal
// diagnoses). A polynomial claim must stay within c*|COMPS|*k for each
// tested k; an exponential claim must reach 2^m live nodes at k=all.
inline Evidence check_space(const EngineRunner& run, const FeatureVector& claim, const SpaceSpec& spec = {},
                            const CheckOptions& options = {}) {
  std::ostringstream trace;
  for (std::size_t m = spec.m_min; m <= spec.m_max; ++m) {
    const Dpi dpi = io::independent_conflicts_family(m);
    const auto rates = FailureRates::uniform(dpi.size(), kDefaultFailureRate);
    if (claim.space == Space::Poly) {
      for (auto k : spec.ks) {
        auto oracle = options.oracle();
        const auto peak = run(dpi, DiagnosisQuery::first(k), rates, *oracle).stats.peak_live_nodes;
        const auto bound = spec.c * dpi.size() * k;
        if (peak > bound) {
          return fail("m=" + std::to_string(m) + " k=" + std::to_string(k) + ": peak " + std::to_string(peak) + " > " +
                      std::to_string(bound));
        }
        if (k == spec.ks.front()) trace << (m == spec.m_min ? "" : " ") << "m=" << m << ":" << peak;
      }
    } else if (claim.space == Space::Exponential) {
      auto oracle = options.oracle();
      const auto peak = run(dpi, DiagnosisQuery::all(), rates, *oracle).stats.peak_live_nodes;
      if (peak < (std::size_t{1} << m)) {
        return fail("m=" + std::to_string(m) + ": peak " + std::to_string(peak) + " < 2^m, no exponential growth");
      }
      trace << (m == spec.m_min ? "" : " ") << "m=" << m << ":" << peak;
    } else {
      return untestable("unknown space claim");
    }
  }
  if (claim.space == Space::Poly) {
    return pass("peak <= " + std::to_string(spec.c) + "*|COMPS|*k for k in {1,2,3}; k=1 peaks " + trace.str());
  }
  return pass("peak >= 2^m at k=all; peaks " + trace.str());
}

struct EngineConformance {
  EngineId engine = EngineId::HsTree;
  FeatureVector claimed;
  std::array<Evidence, kFeatureCount> evidence{};

  const Evidence& at(Feature f) const { return evidence[static_cast<std::size_t>(f)]; }
  bool operator==(const EngineConformance&) const = default;
};

struct ConformanceReport {
  std::string corpus;
  std::vector<EngineConformance> engines;

  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& e : engines) {
      for (const auto& ev : e.evidence) n += ev.outcome == Outcome::Fail ? 1 : 0;
    }
    return n;
  }
  bool operator==(const ConformanceReport&) const = default;
};

// Runner used by the harness for a shipped engine. The completeness check
// gives the greedy engine a single restart, the budget its incompleteness
// claim is demonstrated at.
inline EngineRunner harness_runner(EngineId engine, Feature feature) {
  EngineParams params;
  if (engine == EngineId::GreedyHeuristic && feature == Feature::Completeness) params.greedy.restarts = 1;
  return make_runner(engine, params);
}

inline EngineConformance check_engine(const std::function<EngineRunner(Feature)>& runner_for, EngineId id, const FeatureVector& claim, const CheckCorpus& corpus,
                                      const CheckOptions& options = {}, const SpaceSpec& space = {}) {
  EngineConformance row;
  row.engine = id;
  row.claimed = claim;
  auto set = [&row](Feature f, Evidence e) { row.evidence[static_cast<std::size_t>(f)] = std::move(e); };
  set(Feature::Soundness, check_soundness(runner_for(Feature::Soundness), claim, corpus, options));
  set(Feature::Completeness, check_completeness(runner_for(Feature::Completeness), claim, corpus, options));
  set(Feature::BestFirst, check_best_first(runner_for(Feature::BestFirst), claim, corpus, options));
  set(Feature::OutputType, check_output_type(runner_for(Feature::OutputType), claim, corpus, options));
  set(Feature::Space, check_space(runner_for(Feature::Space), claim, space, options));
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    if (!is_behavioral(static_cast<Feature>(f))) row.evidence[f] = untestable("structural");
  }
  return row;
}

inline ConformanceReport run_conformance(const CheckCorpus& corpus, const std::vector<EngineId>& engines,
                                         const CheckOptions& options = {}) {
  ConformanceReport report;
  report.corpus = corpus.description;
  auto sorted = engines;
  std::sort(sorted.begin(), sorted.end(), [](EngineId a, EngineId b) { return to_string(a) < to_string(b); });
  for (auto id : sorted) {
    report.engines.push_back(check_engine([id](Feature f) { return harness_runner(id, f); },
                                          id, claimed_vector(id), corpus, options));
  }
  return report;
}

// Mutants for checker sensitivity. Each one runs under the claim of the
// engine it was derived from.
inline EngineRunner unsound_mutant() {
  EngineParams params;
  params.greedy.minimize = false;
  return make_runner(EngineId::GreedyHeuristic, params);
}

inline EngineRunner shuffled_mutant(EngineId base) {
  return [base](const Dpi& dpi, const DiagnosisQuery& q, const FailureRates& rates, ConsistencyOracle& oracle) {
    auto r = make_runner(base)(dpi, q, rates, oracle);
    std::reverse(r.diagnoses.begin(), r.diagnoses.end());
    if (r.probabilities) std::reverse(r.probabilities->begin(), r.probabilities->end());
    return r;
  };
}

inline EngineRunner truncated_mutant(EngineId base) {
  return [base](const Dpi& dpi, const DiagnosisQuery& q, const FailureRates& rates, ConsistencyOracle& oracle) {
    auto r = make_runner(base)(dpi, q, rates, oracle);
    if (r.diagnoses.size() > 1) {
      r.diagnoses.pop_back();
      if (r.probabilities) r.probabilities->pop_back();
    }
    return r;
  };
}

enum class TableFormat { Markdown, Csv, Json };

inline TableFormat parse_table_format(const std::string& s) {
  if (s == "markdown" || s == "md") return TableFormat::Markdown;
  if (s == "csv") return TableFormat::Csv;
  if (s == "json") return TableFormat::Json;
  throw PreconditionError("unknown report format '" + s + "' (markdown, csv, json)");
}

inline std::string evidence_cell(const FeatureVector& v, Feature f, const Evidence& e) {
  std::string cell = cell_text(v, f) + " [" + outcome_mark(e);
  if (!e.detail.empty()) cell += ": " + e.detail;
  return cell + "]";
}

inline nlohmann::json to_json(const ConformanceReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.engines) {
    nlohmann::json evidence = nlohmann::json::object();
    nlohmann::json cells = nlohmann::json::object();
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      evidence[kFeatureKeys[f]] = row.evidence[f];
      cells[kColumnNames[f]] = cell_text(row.claimed, static_cast<Feature>(f));
    }
    rows.push_back({{"engine", std::string(to_string(row.engine))}, {"claimed", row.claimed}, {"cells", cells}, {"evidence", evidence}});
  }
  return {{"format_version", 1}, {"corpus", report.corpus}, {"failures", report.failures()}, {"engines", rows}};
}

inline ConformanceReport report_from_json(const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != 1) throw PreconditionError("unsupported report format_version");
  ConformanceReport report;
  report.corpus = j.at("corpus").get<std::string>();
  for (const auto& r : j.at("engines")) {
    EngineConformance row;
    row.engine = parse_engine_id(r.at("engine").get<std::string>());
    row.claimed = r.at("claimed").get<FeatureVector>();
    for (std::size_t f = 0; f < kFeatureCount; ++f) row.evidence[f] = r.at("evidence").at(kFeatureKeys[f]).get<Evidence>();
    report.engines.push_back(std::move(row));
  }
  return report;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string md_field(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace detail

// Rows are sorted by engine id.
inline std::string emit_table(const ConformanceReport& report, TableFormat format) {
  std::ostringstream out;
  auto rows = report.engines;
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return to_string(a.engine) < to_string(b.engine); });
  switch (format) {
    case TableFormat::Json: {
      ConformanceReport sorted{report.corpus, rows};
      return to_json(sorted).dump(2) + "\n";
    }
    case TableFormat::Csv:
      out << "engine";
      for (auto c : kColumnNames) out << ',' << c;
      out << "\n";
      for (const auto& row : rows) {
        out << to_string(row.engine);
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
          out << ',' << detail::csv_field(evidence_cell(row.claimed, static_cast<Feature>(f), row.evidence[f]));
        }
        out << "\n";
      }
      return out.str();
    case TableFormat::Markdown:
      out << "| engine |";
      for (auto c : kColumnNames) out << ' ' << c << " |";
      out << "\n|---|";
      for (std::size_t f = 0; f < kFeatureCount; ++f) out << "---|";
      out << "\n";
      for (const auto& row : rows) {
        out << "| " << to_string(row.engine) << " |";
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
          out << ' ' << detail::md_field(evidence_cell(row.claimed, static_cast<Feature>(f), row.evidence[f])) << " |";
        }
        out << "\n";
      }
      if (!rows.empty() && !report.corpus.empty()) out << "\nCorpus: " << report.corpus << "\n";
      return out.str();
  }
  return {};
}

}  // namespace mbd::taxonomy
