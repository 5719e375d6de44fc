#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mbd/dpi.hpp"
#include "mbd/error.hpp"
#include "mbd/predicates.hpp"
#include "mbd/reasoner.hpp"
#include "mbd/sentence.hpp"

namespace mbd::io {

struct CorpusSpec {
  std::size_t count = 200;
  std::size_t n_components = 8;
  // upper bound on behaviors + background + observations per instance
  std::size_t clause_budget = 16;
  std::uint64_t seed = 42;
};

struct CorpusInstance {
  Dpi dpi;
  FailureRates rates;
};

namespace detail {

class CorpusRng {
 public:
  explicit CorpusRng(std::uint64_t seed) : engine_(seed) {}

  // Plain modulo reduction rather than std::uniform_int_distribution, whose
  // output is not specified across standard libraries.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  bool chance(std::size_t percent) { return below(100) < percent; }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

// Small gate-level system: inputs X*, one output wire Y<i> per component.
// Components are gates over earlier signals, inverters, implications or
// sources. Observations fix some inputs and some outputs, at least one
// output opposite to the fault-free prediction.
inline std::optional<Dpi> try_circuit(CorpusRng& rng, std::size_t n, std::size_t budget, const std::string& name) {
  const std::size_t n_inputs = 1 + rng.below(3);
  std::vector<std::string> signals;
  for (std::size_t i = 0; i < n_inputs; ++i) signals.push_back("X" + std::to_string(i + 1));

  std::vector<std::string> comps;
  std::vector<Sentence> behaviors;
  for (std::size_t i = 0; i < n; ++i) {
    comps.push_back("c" + std::to_string(i + 1));
    const auto out = atom("Y" + std::to_string(i + 1));
    auto pick = [&] { return atom(signals[rng.below(signals.size())]); };
    const std::size_t kind = rng.below(100);
    if (kind < 15) {
      behaviors.push_back(rng.chance(50) ? out : neg(out));
    } else if (kind < 30) {
      behaviors.push_back(iff(out, neg(pick())));
    } else if (kind < 45) {
      behaviors.push_back(implies(pick(), out));
    } else {
      auto a = pick();
      auto b = pick();
      switch (rng.below(3)) {
        case 0: behaviors.push_back(iff(out, conj(a, b))); break;
        case 1: behaviors.push_back(iff(out, disj(a, b))); break;
        default: behaviors.push_back(iff(out, neg(iff(a, b)))); break;
      }
    }
    signals.push_back("Y" + std::to_string(i + 1));
  }

  // fault-free simulation under random inputs
  std::vector<bool> input_value(n_inputs);
  for (std::size_t i = 0; i < n_inputs; ++i) input_value[i] = rng.chance(50);
  const std::size_t obs_budget = budget > n ? budget - n : 1;
  std::vector<Sentence> obs;
  for (std::size_t i = 0; i < n_inputs && obs.size() + 1 < obs_budget; ++i) {
    if (!rng.chance(70)) continue;
    const auto x = atom(signals[i]);
    obs.push_back(input_value[i] ? x : neg(x));
  }
  // outputs, newest first, until the budget is used; the first one flipped
  const std::size_t wanted = 1 + rng.below(std::max<std::size_t>(1, obs_budget - obs.size()));
  std::vector<std::size_t> outs;
  for (std::size_t i = n; i-- > 0 && outs.size() < wanted;) {
    if (outs.empty() || rng.chance(60)) outs.push_back(i);
  }

  // Predicted value per output from a throwaway model check: ask whether
  // the all-ok system with these inputs entails Y or !Y.
  Dpi probe(comps, behaviors, {}, obs, {}, name);
  DpllOracle oracle;
  const auto healthy = encode_dpi(probe, probe.all_components(), {});
  if (!oracle.consistent(healthy)) return std::nullopt;
  bool flipped = false;
  for (auto i : outs) {
    const auto y = atom("Y" + std::to_string(i + 1));
    const bool entails_true = check_entailed(oracle, healthy, y);
    const bool entails_false = check_entailed(oracle, healthy, neg(y));
    bool value;
    if (entails_true || entails_false) {
      value = entails_true;
      if (!flipped) {
        value = !value;
        flipped = true;
      } else if (rng.chance(25)) {
        value = !value;
      }
    } else {
      value = rng.chance(50);
    }
    obs.push_back(value ? y : neg(y));
  }
  if (obs.size() + n > budget) return std::nullopt;
  return Dpi(comps, behaviors, {}, obs, {}, name);
}

}  // namespace detail

// Deterministic per seed. Every instance has at least one diagnosis (the
// observations alone are satisfiable) and at least one nonempty conflict.
inline std::vector<CorpusInstance> generate_corpus(const CorpusSpec& spec) {
  if (spec.n_components == 0 || spec.n_components > 20) throw PreconditionError("corpus instances need 1..20 components");
  if (spec.clause_budget <= spec.n_components) {
    throw PreconditionError("clause budget must leave room for at least one observation");
  }
  detail::CorpusRng rng(spec.seed);
  DpllOracle oracle;
  std::vector<CorpusInstance> out;
  out.reserve(spec.count);
  std::size_t attempts = 0;
  while (out.size() < spec.count) {
    if (++attempts > 1000 * (spec.count + 1)) throw Error("corpus generator could not satisfy the constraints");
    const std::string name = "g" + std::to_string(spec.seed) + "_" + std::to_string(out.size());
    auto dpi = detail::try_circuit(rng, spec.n_components, spec.clause_budget, name);
    if (!dpi) continue;
    if (!is_diagnosis(*dpi, dpi->all_components(), oracle)) continue;
    if (!is_conflict(*dpi, dpi->all_components(), oracle)) continue;
    std::vector<double> rates;
    for (std::size_t c = 0; c < spec.n_components; ++c) rates.push_back(0.01 + 0.29 * rng.unit());
    out.push_back({std::move(*dpi), FailureRates(std::move(rates))});
  }
  return out;
}

// m independent two-component conflicts {a_i, b_i}:
//   a_i: A_i,  b_i: A_i -> B_i,  OBS: !B_i
// There are exactly 2^m minimal diagnoses, one element from each pair.
inline Dpi independent_conflicts_family(std::size_t m) {
  if (2 * m > kMaxComponents) throw BoundExceededError("family too large");
  std::vector<std::string> names;
  std::vector<Sentence> behaviors;
  std::vector<Sentence> obs;
  for (std::size_t i = 1; i <= m; ++i) {
    const auto a = atom("A" + std::to_string(i));
    const auto b = atom("B" + std::to_string(i));
    names.push_back("a" + std::to_string(i));
    behaviors.push_back(a);
    names.push_back("b" + std::to_string(i));
    behaviors.push_back(implies(a, b));
    obs.push_back(neg(b));
  }
  return Dpi(std::move(names), std::move(behaviors), {}, std::move(obs), {}, "independent_" + std::to_string(m));
}

}  // namespace mbd::io
