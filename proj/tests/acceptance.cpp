// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// fails. Sizes, seeds and limits are pinned below.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mbd/conflicts.hpp"
#include "mbd/engines.hpp"
#include "mbd/io/corpus.hpp"
#include "mbd/predicates.hpp"
#include "mbd/reasoner.hpp"
#include "mbd/sequential.hpp"
#include "mbd/taxonomy.hpp"
#include "support/naive.hpp"

using namespace mbd;

namespace {

// pinned limits
constexpr double kEquivalenceSeconds = 300.0;
constexpr std::size_t kEquivalenceInstances = 200;
constexpr std::size_t kEquivalenceComponents = 10;
constexpr std::size_t kEquivalenceSentences = 20;
constexpr std::uint64_t kSeed = 20240611;
constexpr std::size_t kLawInstances = 50;
constexpr std::size_t kConflictCalls = 1000;
constexpr std::size_t kSessions = 100;
constexpr std::size_t kSubstitutionInstances = 50;
constexpr std::size_t kSpaceFactor = 4;

struct Verdict {
  bool ok;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Verdict()>& criterion) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v{false, ""};
  try {
    v = criterion();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!v.ok) ++failures;
  std::ostringstream t;
  t.setf(std::ios::fixed);
  t.precision(1);
  t << secs;
  std::cout << (v.ok ? "PASS " : "FAIL ") << name << ": " << v.detail << " (" << t.str() << "s)" << std::endl;
}

std::string names(const Dpi& dpi, const std::vector<ComponentSet>& sets) { return taxonomy::detail::set_list(dpi, sets); }

// The corpus shared by equivalence, best-first order and substitutability.
const std::vector<io::CorpusInstance>& main_corpus() {
  static const auto corpus =
      io::generate_corpus({kEquivalenceInstances, kEquivalenceComponents, kEquivalenceSentences, kSeed});
  return corpus;
}

Verdict oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  const auto& corpus = main_corpus();
  std::size_t total = 0;
  for (const auto& inst : corpus) {
    if (inst.dpi.size() > kEquivalenceComponents) return {false, inst.dpi.name() + " has too many components"};
    const auto sentences = inst.dpi.size() + inst.dpi.background().size() + inst.dpi.obs().size();
    if (sentences > kEquivalenceSentences) return {false, inst.dpi.name() + " has too many sentences"};
    DpllOracle oracle;
    const auto truth = run_brute_force(inst.dpi, oracle).diagnoses;
    total += truth.size();
    for (auto e : {EngineId::HsTree, EngineId::UcsHsTree, EngineId::InvHsTree}) {
      auto got = make_runner(e)(inst.dpi, DiagnosisQuery::all(), inst.rates, oracle).diagnoses;
      sort_canonical(got);
      if (got != truth) {
        return {false, std::string(to_string(e)) + " on " + inst.dpi.name() + ": " + names(inst.dpi, got) + " vs " +
                           names(inst.dpi, truth)};
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream d;
  d << corpus.size() << " instances, " << total << " minimal diagnoses, 3 engines equal to brute force";
  if (secs >= kEquivalenceSeconds) return {false, d.str() + "; too slow"};
  return {true, d.str()};
}

std::map<std::string, std::vector<std::string>> reference_rows() {
  std::ifstream in(std::string(MBD_DATA_DIR) + "/reference_features.csv");
  if (!in) throw Error("reference table missing");
  std::map<std::string, std::vector<std::string>> rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) {
      if (f.size() >= 2 && f.front() == '"') f = f.substr(1, f.size() - 2);
      cells.push_back(f);
    }
    rows[cells.at(0)] = std::vector<std::string>(cells.begin() + 2, cells.end());
  }
  return rows;
}

Verdict conformance_report() {
  const auto corpus = taxonomy::prepare_corpus({60, 7, 14, 42});
  const auto report = taxonomy::run_conformance(corpus, {kAllEngines.begin(), kAllEngines.end()});
  if (report.failures() != 0) {
    return {false, std::to_string(report.failures()) + " failing cells:\n" +
                       taxonomy::emit_table(report, taxonomy::TableFormat::Markdown)};
  }
  const auto ref = reference_rows();
  const std::map<EngineId, std::string> backed = {
      {EngineId::HsTree, "HS-Tree"}, {EngineId::UcsHsTree, "Unif-cost HS-Tree*"}, {EngineId::InvHsTree, "Inv-HS-Tree"}};
  std::size_t behavioral = 0;
  for (const auto& row : report.engines) {
    auto it = backed.find(row.engine);
    if (it == backed.end()) continue;
    const auto& cells = ref.at(it->second);
    for (std::size_t f = 0; f < taxonomy::kFeatureCount; ++f) {
      const auto feature = static_cast<taxonomy::Feature>(f);
      if (!taxonomy::is_behavioral(feature)) continue;
      const auto cell = taxonomy::cell_text(row.claimed, feature);
      if (cell != cells.at(f)) {
        return {false, it->second + " " + taxonomy::kColumnNames[f] + ": " + cell + " vs reference " + cells.at(f)};
      }
      if (row.evidence[f].outcome != taxonomy::Outcome::Pass) {
        return {false, it->second + " " + taxonomy::kColumnNames[f] + " not checked: " + row.evidence[f].detail};
      }
      ++behavioral;
    }
  }
  return {true, "zero failures over " + std::to_string(report.engines.size()) + " engines; " + std::to_string(behavioral) +
                    " behavioral cells of the reference rows match and pass"};
}

Verdict best_first_order() {
  std::size_t pairs = 0, ties = 0;
  for (const auto& inst : main_corpus()) {
    DpllOracle oracle;
    const auto hs = make_runner(EngineId::HsTree)(inst.dpi, DiagnosisQuery::all(), inst.rates, oracle).diagnoses;
    for (std::size_t j = 1; j < hs.size(); ++j, ++pairs) {
      if (hs[j - 1].size() > hs[j].size()) return {false, "hs_tree order on " + inst.dpi.name() + ": " + names(inst.dpi, hs)};
    }
    const auto ucs = make_runner(EngineId::UcsHsTree)(inst.dpi, DiagnosisQuery::all(), inst.rates, oracle).diagnoses;
    for (std::size_t j = 1; j < ucs.size(); ++j, ++pairs) {
      const double a = diagnosis_probability(ucs[j - 1], inst.rates);
      const double b = diagnosis_probability(ucs[j], inst.rates);
      if (a < b) return {false, "ucs_hs_tree order on " + inst.dpi.name() + ": " + names(inst.dpi, ucs)};
      if (a == b) ++ties;
    }
    // deterministic: a second run emits the same sequence
    DpllOracle again;
    if (make_runner(EngineId::UcsHsTree)(inst.dpi, DiagnosisQuery::all(), inst.rates, again).diagnoses != ucs) {
      return {false, "ucs_hs_tree emission differs between runs on " + inst.dpi.name()};
    }
  }
  // uniform rates: every equal-cardinality pair ties exactly; ties must come
  // out in canonical (cardinality, then index) order
  std::size_t uniform_ties = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    const auto& inst = main_corpus()[i];
    const auto rates = FailureRates::uniform(inst.dpi.size(), kDefaultFailureRate);
    DpllOracle oracle;
    const auto ucs = make_runner(EngineId::UcsHsTree)(inst.dpi, DiagnosisQuery::all(), rates, oracle).diagnoses;
    auto canonical = ucs;
    sort_canonical(canonical);
    if (ucs != canonical) return {false, "uniform-rate ties out of canonical order on " + inst.dpi.name() + ": " + names(inst.dpi, ucs)};
    for (std::size_t j = 1; j < ucs.size(); ++j) uniform_ties += ucs[j - 1].size() == ucs[j].size();
  }
  return {true, std::to_string(pairs) + " adjacent pairs in order, " + std::to_string(ties) + " exact ties; " +
                    std::to_string(uniform_ties) + " uniform-rate ties in canonical order"};
}

Verdict space_separation() {
  std::ostringstream d;
  for (std::size_t m = 4; m <= 8; ++m) {
    const Dpi dpi = io::independent_conflicts_family(m);
    const auto rates = FailureRates::uniform(dpi.size(), kDefaultFailureRate);
    DpllOracle oracle;
    const auto inv = make_runner(EngineId::InvHsTree)(dpi, DiagnosisQuery::first(1), rates, oracle).stats.peak_live_nodes;
    const auto hs = make_runner(EngineId::HsTree)(dpi, DiagnosisQuery::all(), rates, oracle).stats.peak_live_nodes;
    d << (m == 4 ? "" : " ") << "m=" << m << ":inv " << inv << "/hs " << hs;
    if (inv > kSpaceFactor * dpi.size()) return {false, d.str() + "; inv_hs_tree above 4*|COMPS|"};
    if (hs < (std::size_t{1} << m)) return {false, d.str() + "; hs_tree below 2^m"};
  }
  return {true, d.str()};
}

// For every subset x of COMPS: is_diagnosis(x) == !is_conflict(COMPS\x), x
// is a diagnosis iff it hits every minimal conflict, and the minimal
// diagnoses are exactly the minimal hitting sets of the minimal conflicts.
// Minimal conflicts come from the enumeration-based oracle.
Verdict duality_laws() {
  const auto corpus = io::generate_corpus({kLawInstances, 8, 16, kSeed + 1});
  std::size_t checked = 0;
  for (const auto& inst : corpus) {
    mbd::testing::NaiveSemantics naive(inst.dpi);
    const auto conflicts = naive.minimal_conflicts();
    DpllOracle oracle;
    const std::uint64_t n = std::uint64_t{1} << inst.dpi.size();
    std::vector<ComponentSet> hitting;
    for (std::uint64_t b = 0; b < n; ++b) {
      const auto x = ComponentSet::from_bits(b);
      const bool diag = is_diagnosis(inst.dpi, x, oracle);
      if (diag != !is_conflict(inst.dpi, inst.dpi.all_components() - x, oracle)) {
        return {false, inst.dpi.name() + ": duality fails at " + inst.dpi.set_to_string(x)};
      }
      bool hits = true;
      for (auto c : conflicts) hits = hits && !(ComponentSet::from_bits(c) & x).empty();
      if (diag != hits) return {false, inst.dpi.name() + ": hitting-set law fails at " + inst.dpi.set_to_string(x)};
      if (hits) hitting.push_back(x);
      ++checked;
    }
    std::set<std::uint64_t> minimal_hitting;
    for (auto h : hitting) {
      bool minimal = true;
      for (auto o : hitting) minimal = minimal && !o.is_proper_subset_of(h);
      if (minimal) minimal_hitting.insert(h.bits());
    }
    DpllOracle fresh;
    if (minimal_hitting != mbd::testing::bits_of(run_brute_force(inst.dpi, fresh).diagnoses)) {
      return {false, inst.dpi.name() + ": minimal diagnoses differ from minimal hitting sets"};
    }
  }
  return {true, std::to_string(checked) + " subsets of " + std::to_string(corpus.size()) + " instances, zero violations"};
}

Verdict conflict_minimality() {
  const auto corpus = io::generate_corpus({40, 8, 16, kSeed + 2});
  std::vector<std::set<std::uint64_t>> enumerated;
  for (const auto& inst : corpus) enumerated.push_back(mbd::testing::NaiveSemantics(inst.dpi).minimal_conflicts());
  std::mt19937_64 rng(kSeed);
  std::size_t found = 0, empty_scopes = 0;
  for (std::size_t round = 0; found < kConflictCalls; ++round) {
    if (round > 20 * kConflictCalls) return {false, "too few conflicting scopes"};
    const auto& inst = corpus[round % corpus.size()];
    const auto& truth = enumerated[round % corpus.size()];
    mbd::testing::NaiveSemantics naive(inst.dpi);
    // first pass over each instance uses all of COMPS, later passes random scopes
    const std::uint64_t all = inst.dpi.all_components().bits();
    const auto scope = ComponentSet::from_bits(round < corpus.size() ? all : (rng() & all));
    DpllOracle oracle;
    const auto c = find_minimal_conflict({inst.dpi, scope}, oracle);
    if (!c) {
      if (naive.is_conflict(scope)) return {false, inst.dpi.name() + ": missed conflict in " + inst.dpi.set_to_string(scope)};
      ++empty_scopes;
      continue;
    }
    ++found;
    if (!c->is_subset_of(scope) || !naive.is_conflict(*c)) {
      return {false, inst.dpi.name() + ": " + inst.dpi.set_to_string(*c) + " is not a conflict inside the scope"};
    }
    for (auto e : *c) {
      auto smaller = *c;
      smaller.erase(e);
      if (naive.is_conflict(smaller)) return {false, inst.dpi.name() + ": " + inst.dpi.set_to_string(*c) + " not minimal"};
    }
    if (!truth.count(c->bits())) return {false, inst.dpi.name() + ": not among the enumerated minimal conflicts"};
  }
  return {true, std::to_string(found) + " conflicts minimal and enumerated; " + std::to_string(empty_scopes) +
                    " conflict-free scopes correctly answered none"};
}

std::vector<std::string> leading_events(const sequential::Session& s) {
  std::vector<std::string> out;
  for (const auto& line : s.transcript) {
    if (line.find("\"event\":\"leading\"") != std::string::npos) out.push_back(line);
  }
  return out;
}

Verdict sequential_convergence() {
  const auto corpus = io::generate_corpus({3 * kSessions, 8, 16, kSeed + 3});
  std::mt19937_64 rng(kSeed + 4);
  std::size_t sessions = 0, unique = 0, indistinguishable = 0, measurements = 0;
  for (const auto& inst : corpus) {
    if (sessions == kSessions) break;
    DpllOracle oracle;
    const auto minimal = run_brute_force(inst.dpi, oracle).diagnoses;
    if (minimal.size() < 2) continue;
    const auto truth = minimal[rng() % minimal.size()];
    const EngineId engine = sessions % 2 ? EngineId::UcsHsTree : EngineId::HsTree;
    sequential::SessionConfig cfg;
    cfg.leading_k = 2;
    cfg.stop_probability = std::nullopt;

    // both modes answered by the same world, step by step
    sequential::SimulatedOracle world(truth);
    cfg.engine = engine;
    cfg.mode = sequential::Mode::Stateless;
    auto a = sequential::start_session(inst.dpi, inst.rates, cfg, oracle);
    cfg.mode = sequential::Mode::Stateful;
    auto b = sequential::start_session(inst.dpi, inst.rates, cfg, oracle);
    const std::size_t limit = inst.dpi.vocabulary().size();
    while (true) {
      if (a.leading != b.leading) return {false, inst.dpi.name() + ": modes diverge at step " + std::to_string(a.history.size())};
      auto qa = sequential::next_query(a, oracle);
      auto qb = sequential::next_query(b, oracle);
      if (a.leading != b.leading || qa.has_value() != qb.has_value()) {
        return {false, inst.dpi.name() + ": modes diverge at step " + std::to_string(a.history.size())};
      }
      if (!qa) break;
      if (a.history.size() >= limit) return {false, inst.dpi.name() + ": more than |atoms| measurements"};
      const bool answer = world.answer(a, *qa, oracle);
      a = sequential::ingest_answer(a, *qa, answer, oracle);
      b = sequential::ingest_answer(b, *qb, answer, oracle);
    }
    if (leading_events(a) != leading_events(b)) return {false, inst.dpi.name() + ": leading events differ between modes"};
    if (a.status != sequential::Status::Done || !a.final_diagnosis) return {false, inst.dpi.name() + ": not done"};
    // ground truth still explains every answer and stays minimal
    if (!is_minimal_diagnosis(a.dpi, truth, oracle)) {
      return {false, inst.dpi.name() + ": ground truth no longer a minimal diagnosis"};
    }
    if (a.reason == sequential::StopReason::Unique) {
      if (*a.final_diagnosis != truth) return {false, inst.dpi.name() + ": unique result differs from ground truth"};
      ++unique;
    } else if (a.reason == sequential::StopReason::Indistinguishable) {
      if (std::find(a.leading.begin(), a.leading.end(), truth) == a.leading.end()) {
        return {false, inst.dpi.name() + ": ground truth not among indistinguishable candidates"};
      }
      ++indistinguishable;
    } else {
      return {false, inst.dpi.name() + ": unexpected stop reason " + to_string(a.reason)};
    }
    measurements += a.history.size();
    ++sessions;
  }
  if (sessions < kSessions) return {false, "only " + std::to_string(sessions) + " sessions with >= 2 diagnoses"};
  return {true, std::to_string(sessions) + " sessions, " + std::to_string(measurements) + " measurements; " +
                    std::to_string(unique) + " isolated the ground truth, " + std::to_string(indistinguishable) +
                    " ended with it among measurement-indistinguishable candidates; modes identical at every step"};
}

Verdict substitutability() {
  const auto& corpus = main_corpus();
  std::size_t lists = 0;
  for (std::size_t i = 0; i < kSubstitutionInstances; ++i) {
    const auto& inst = corpus[i];
    for (auto e : kAllEngines) {
      DpllOracle dpll;
      TruthTableOracle table;
      for (auto q : {DiagnosisQuery::all(), DiagnosisQuery::first(2)}) {
        const auto a = make_runner(e)(inst.dpi, q, inst.rates, dpll).diagnoses;
        const auto b = make_runner(e)(inst.dpi, q, inst.rates, table).diagnoses;
        if (a != b) return {false, std::string(to_string(e)) + " on " + inst.dpi.name() + " differs by oracle"};
        ++lists;
      }
    }
  }
  return {true, std::to_string(lists) + " diagnosis lists identical under both checkers"};
}

Verdict mutation_sensitivity() {
  using namespace taxonomy;
  const auto corpus = prepare_corpus({60, 7, 14, 42});
  const auto unsound = check_soundness(unsound_mutant(), claimed_vector(EngineId::GreedyHeuristic), corpus);
  const auto shuffled_hs = check_best_first(shuffled_mutant(EngineId::HsTree), claimed_vector(EngineId::HsTree), corpus);
  const auto shuffled_ucs = check_best_first(shuffled_mutant(EngineId::UcsHsTree), claimed_vector(EngineId::UcsHsTree), corpus);
  const auto truncated = check_completeness(truncated_mutant(EngineId::HsTree), claimed_vector(EngineId::HsTree), corpus);
  const auto truncated_inv = check_completeness(truncated_mutant(EngineId::InvHsTree), claimed_vector(EngineId::InvHsTree), corpus);
  for (const auto* e : {&unsound, &shuffled_hs, &shuffled_ucs, &truncated, &truncated_inv}) {
    if (e->outcome != Outcome::Fail) return {false, "a mutant passed: " + e->detail};
  }
  return {true, "soundness, best-first and completeness checks each reject their mutant"};
}

}  // namespace

int main() {
  report("oracle_equivalence", oracle_equivalence);
  report("conformance_report", conformance_report);
  report("best_first_order", best_first_order);
  report("space_separation", space_separation);
  report("duality_hitting_set_laws", duality_laws);
  report("conflict_minimality", conflict_minimality);
  report("sequential_convergence", sequential_convergence);
  report("blackbox_substitutability", substitutability);
  report("mutation_sensitivity", mutation_sensitivity);
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << 9 - failures << "/9" << std::endl;
  return failures ? 1 : 0;
}
