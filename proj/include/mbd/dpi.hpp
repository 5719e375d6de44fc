#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mbd/component_set.hpp"
#include "mbd/error.hpp"
#include "mbd/sentence.hpp"

namespace mbd {

struct Component {
  ComponentIndex id = 0;
  std::string name;

  friend bool operator==(const Component&, const Component&) = default;
};

// Name of the reserved health atom of a component. The parenthesis keeps it
// outside the identifier syntax of the text format.
inline std::string ok_atom_name(const std::string& component_name) { return "ok(" + component_name + ")"; }

inline bool is_reserved_atom(const std::string& name) { return name.find('(') != std::string::npos; }

// Diagnosis problem instance <SD, COMPS, OBS, MEAS> under the weak fault
// model: SD is the per-component behavior ok(c) -> BEH(c) plus background.
class Dpi {
 public:
  Dpi() = default;

  Dpi(std::vector<std::string> component_names, std::vector<Sentence> behaviors, std::vector<Sentence> background = {},
      std::vector<Sentence> obs = {}, std::vector<Sentence> meas = {}, std::string name = {})
      : name_(std::move(name)),
        behaviors_(std::move(behaviors)),
        background_(std::move(background)),
        obs_(std::move(obs)),
        meas_(std::move(meas)) {
    if (component_names.size() != behaviors_.size()) {
      throw PreconditionError("one behavior sentence is required per component");
    }
    if (component_names.size() > kMaxComponents) throw BoundExceededError("at most 64 components are supported");
    std::unordered_set<std::string> seen;
    comps_.reserve(component_names.size());
    for (std::size_t i = 0; i < component_names.size(); ++i) {
      if (component_names[i].empty()) throw PreconditionError("component names must not be empty");
      if (!seen.insert(component_names[i]).second) {
        throw PreconditionError("duplicate component name '" + component_names[i] + "'");
      }
      comps_.push_back(Component{i, std::move(component_names[i])});
    }
    for (const auto* group : {&behaviors_, &background_, &obs_, &meas_}) {
      for (const auto& s : *group) {
        for (const auto& a : s.atoms()) {
          if (is_reserved_atom(a)) throw PreconditionError("atom '" + a + "' uses the reserved health-atom syntax");
        }
      }
    }
  }

  const std::string& name() const noexcept { return name_; }
  const std::vector<Component>& components() const noexcept { return comps_; }
  std::size_t size() const noexcept { return comps_.size(); }
  ComponentSet all_components() const { return ComponentSet::all(comps_.size()); }

  const Sentence& behavior(ComponentIndex c) const { return behaviors_.at(c); }
  const std::vector<Sentence>& behaviors() const noexcept { return behaviors_; }
  const std::vector<Sentence>& background() const noexcept { return background_; }
  const std::vector<Sentence>& obs() const noexcept { return obs_; }
  const std::vector<Sentence>& meas() const noexcept { return meas_; }

  std::optional<ComponentIndex> find_component(const std::string& name) const {
    for (const auto& c : comps_) {
      if (c.name == name) return c.id;
    }
    return std::nullopt;
  }

  // Copy of this DPI with MEAS extended by one sentence.
  Dpi with_measurement(Sentence m) const {
    Dpi copy = *this;
    copy.meas_.push_back(std::move(m));
    return copy;
  }

  // Atoms of the system vocabulary: everything mentioned by SD, OBS or MEAS.
  std::set<std::string> vocabulary() const {
    std::set<std::string> out;
    for (const auto* group : {&behaviors_, &background_, &obs_, &meas_}) {
      for (const auto& s : *group) s.collect_atoms(out);
    }
    return out;
  }

  std::string set_to_string(ComponentSet s) const {
    std::string out = "{";
    bool first = true;
    for (auto i : s) {
      if (!first) out += ",";
      out += comps_.at(i).name;
      first = false;
    }
    return out + "}";
  }

  std::vector<std::string> set_names(ComponentSet s) const {
    std::vector<std::string> out;
    for (auto i : s) out.push_back(comps_.at(i).name);
    return out;
  }

  friend bool operator==(const Dpi& a, const Dpi& b) {
    return a.name_ == b.name_ && a.comps_ == b.comps_ && a.behaviors_ == b.behaviors_ && a.background_ == b.background_ &&
           a.obs_ == b.obs_ && a.meas_ == b.meas_;
  }

 private:
  std::string name_;
  std::vector<Component> comps_;
  std::vector<Sentence> behaviors_;
  std::vector<Sentence> background_;
  std::vector<Sentence> obs_;
  std::vector<Sentence> meas_;
};

// Per-component prior fault probabilities, each strictly inside (0,1).
class FailureRates {
 public:
  FailureRates() = default;
  explicit FailureRates(std::vector<double> rates) : rates_(std::move(rates)) {
    for (double p : rates_) {
      if (!(p > 0.0 && p < 1.0)) throw PreconditionError("failure rates must lie strictly inside (0,1)");
    }
  }

  static FailureRates uniform(std::size_t n, double p) { return FailureRates(std::vector<double>(n, p)); }

  std::size_t size() const noexcept { return rates_.size(); }
  double operator[](ComponentIndex c) const { return rates_.at(c); }
  const std::vector<double>& values() const noexcept { return rates_; }

  friend bool operator==(const FailureRates&, const FailureRates&) = default;

 private:
  std::vector<double> rates_;
};

inline constexpr double kDefaultFailureRate = 0.1;

// Independent-failure prior: prod_{c in d} p_c * prod_{c not in d} (1 - p_c).
// The two partial products are formed separately, in ascending index order,
// so sets with equal multisets of factors get bit-identical values.
inline double diagnosis_probability(ComponentSet d, const FailureRates& rates) {
  double faulty = 1.0;
  double healthy = 1.0;
  for (std::size_t c = 0; c < rates.size(); ++c) {
    if (d.contains(c)) {
      faulty *= rates[c];
    } else {
      healthy *= 1.0 - rates[c];
    }
  }
  return faulty * healthy;
}

enum class DiagnosisProperty { None, MinimumCardinality };
enum class DiagnosisOrder { Cardinality, Probability, None };

// "Find k minimal diagnoses (satisfying property p)"; k empty means all.
struct DiagnosisQuery {
  std::optional<std::size_t> k;
  DiagnosisProperty property = DiagnosisProperty::None;
  DiagnosisOrder order = DiagnosisOrder::Cardinality;

  static DiagnosisQuery all(DiagnosisOrder order = DiagnosisOrder::Cardinality) { return {std::nullopt, DiagnosisProperty::None, order}; }
  static DiagnosisQuery first(std::size_t k, DiagnosisOrder order = DiagnosisOrder::Cardinality) {
    return {k, DiagnosisProperty::None, order};
  }

  bool wants_more(std::size_t found) const noexcept { return !k || found < *k; }

  void validate() const {
    if (k && *k == 0) throw QueryError("k must be at least 1");
    if (property == DiagnosisProperty::MinimumCardinality && order == DiagnosisOrder::Probability) {
      throw QueryError("minimum-cardinality queries are ordered by cardinality or not at all");
    }
  }
};

}  // namespace mbd
