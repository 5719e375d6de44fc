#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mbd/component_set.hpp"
#include "mbd/dpi.hpp"
#include "mbd/error.hpp"
#include "mbd/sentence.hpp"

namespace mbd {

enum class Consistency { Consistent, Inconsistent };

struct OracleStats {
  std::size_t calls = 0;
  std::size_t cache_hits = 0;
  std::size_t cumulative_clause_count = 0;
};

// Black-box consistency check over whole sentence sets. Engines only ever
// see this interface; nothing about the solver leaks through it.
class ConsistencyOracle {
 public:
  virtual ~ConsistencyOracle() = default;

  Consistency check(std::span<const Sentence> sentences) {
    ++stats_.calls;
    return do_check(sentences);
  }

  bool consistent(std::span<const Sentence> sentences) { return check(sentences) == Consistency::Consistent; }

  virtual std::unique_ptr<ConsistencyOracle> clone() const = 0;
  virtual std::string name() const = 0;

  const OracleStats& stats() const noexcept { return stats_; }
  // Callers that cache results on top of the oracle report hits here so one
  // counter set describes the whole run.
  void record_cache_hit() noexcept { ++stats_.cache_hits; }

 protected:
  virtual Consistency do_check(std::span<const Sentence> sentences) = 0;
  void add_clauses(std::size_t n) noexcept { stats_.cumulative_clause_count += n; }

 private:
  OracleStats stats_;
};

namespace cnf {

// Literal encoding: 2*var for the positive literal, 2*var+1 for the negative.
using Literal = std::uint32_t;
inline Literal positive(std::uint32_t var) { return var * 2; }
inline Literal negative(std::uint32_t var) { return var * 2 + 1; }
inline Literal negate(Literal l) { return l ^ 1U; }
inline std::uint32_t var_of(Literal l) { return l >> 1; }

struct Formula {
  std::uint32_t num_vars = 0;
  std::vector<std::vector<Literal>> clauses;
  bool trivially_unsat = false;
};

// Plaisted-Greenbaum variant of the Tseitin transformation over NNF input.
// Every subformula of an NNF sentence occurs positively, so one implication
// direction per auxiliary is enough for equisatisfiability.
class Encoder {
 public:
  void add(const Sentence& s) { add_nnf(s.to_nnf()); }

  Formula take() { return std::move(out_); }

 private:
  std::uint32_t var_for(const std::string& atom) {
    auto [it, inserted] = vars_.try_emplace(atom, out_.num_vars);
    if (inserted) ++out_.num_vars;
    return it->second;
  }

  std::uint32_t fresh() { return out_.num_vars++; }

  void add_nnf(const Sentence& s) {
    switch (s.connective()) {
      case Connective::True: return;
      case Connective::False: out_.trivially_unsat = true; return;
      case Connective::And:
        add_nnf(s.lhs());
        add_nnf(s.rhs());
        return;
      default: {
        std::vector<Literal> clause;
        collect_disjuncts(s, clause);
        out_.clauses.push_back(std::move(clause));
      }
    }
  }

  void collect_disjuncts(const Sentence& s, std::vector<Literal>& clause) {
    if (s.connective() == Connective::Or) {
      collect_disjuncts(s.lhs(), clause);
      collect_disjuncts(s.rhs(), clause);
      return;
    }
    clause.push_back(literal_for(s));
  }

  Literal literal_for(const Sentence& s) {
    switch (s.connective()) {
      case Connective::Atom: return positive(var_for(s.name()));
      case Connective::Not: return negative(var_for(s.operand().name()));
      case Connective::And: {
        const auto aux = fresh();
        std::vector<Sentence> parts;
        flatten(s, Connective::And, parts);
        for (const auto& p : parts) out_.clauses.push_back({negative(aux), literal_for(p)});
        return positive(aux);
      }
      case Connective::Or: {
        const auto aux = fresh();
        std::vector<Literal> clause{negative(aux)};
        collect_disjuncts(s, clause);
        out_.clauses.push_back(std::move(clause));
        return positive(aux);
      }
      default:
        // constants are folded by to_nnf() unless a whole sentence is constant
        throw ReasonerError("unexpected connective in NNF");
    }
  }

  static void flatten(const Sentence& s, Connective op, std::vector<Sentence>& out) {
    if (s.connective() == op) {
      flatten(s.lhs(), op, out);
      flatten(s.rhs(), op, out);
    } else {
      out.push_back(s);
    }
  }

  std::unordered_map<std::string, std::uint32_t> vars_;
  Formula out_;
};

// Complete DPLL search with unit propagation, shortest-open-clause branching
// and chronological backtracking. Throws ResourceLimitError after
// `decision_budget` decisions.
class DpllSolver {
 public:
  DpllSolver(const Formula& f, std::size_t decision_budget) : f_(f), budget_(decision_budget), value_(f.num_vars, kUnassigned) {}

  bool solve() {
    if (f_.trivially_unsat) return false;
    for (const auto& c : f_.clauses) {
      if (c.empty()) return false;
    }
    if (!propagate()) return false;
    while (true) {
      const auto branch = pick_branch();
      if (!branch) return true;
      if (++decisions_ > budget_) throw ResourceLimitError("decision budget of " + std::to_string(budget_) + " exhausted");
      levels_.push_back(Level{trail_.size(), *branch, false});
      assign(*branch);
      while (!propagate()) {
        if (!backtrack()) return false;
      }
    }
  }

  std::size_t decisions() const noexcept { return decisions_; }

 private:
  static constexpr std::int8_t kUnassigned = -1;

  struct Level {
    std::size_t trail_start;
    Literal decision;
    bool flipped;
  };

  std::int8_t value_of(Literal l) const {
    const auto v = value_[var_of(l)];
    if (v == kUnassigned) return kUnassigned;
    return static_cast<std::int8_t>((l & 1U) ? 1 - v : v);
  }

  void assign(Literal l) {
    value_[var_of(l)] = static_cast<std::int8_t>((l & 1U) ? 0 : 1);
    trail_.push_back(l);
  }

  void undo_to(std::size_t trail_size) {
    while (trail_.size() > trail_size) {
      value_[var_of(trail_.back())] = kUnassigned;
      trail_.pop_back();
    }
  }

  // false iff a clause is falsified
  bool propagate() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& clause : f_.clauses) {
        Literal unit = 0;
        std::size_t open = 0;
        bool satisfied = false;
        for (auto l : clause) {
          const auto v = value_of(l);
          if (v == 1) {
            satisfied = true;
            break;
          }
          if (v == kUnassigned) {
            ++open;
            unit = l;
          }
        }
        if (satisfied) continue;
        if (open == 0) return false;
        if (open == 1) {
          assign(unit);
          changed = true;
        }
      }
    }
    return true;
  }

  // Flip the deepest unflipped decision; false when the search space is exhausted.
  bool backtrack() {
    while (!levels_.empty()) {
      Level& top = levels_.back();
      undo_to(top.trail_start);
      if (!top.flipped) {
        top.flipped = true;
        top.decision = negate(top.decision);
        assign(top.decision);
        return true;
      }
      levels_.pop_back();
    }
    return false;
  }

  // First open literal of the shortest clause not yet satisfied; none left
  // means every clause holds and the remaining variables are free. Branching
  // only inside open clauses keeps the search off irrelevant variables.
  std::optional<Literal> pick_branch() const {
    std::optional<Literal> best;
    std::size_t best_open = 0;
    for (const auto& clause : f_.clauses) {
      std::size_t open = 0;
      std::optional<Literal> first;
      bool satisfied = false;
      for (auto l : clause) {
        const auto v = value_of(l);
        if (v == 1) {
          satisfied = true;
          break;
        }
        if (v == kUnassigned) {
          if (!first) first = l;
          ++open;
        }
      }
      if (satisfied || !first) continue;
      if (!best || open < best_open) {
        best = first;
        best_open = open;
        if (open == 2) break;
      }
    }
    return best;
  }

  const Formula& f_;
  std::size_t budget_;
  std::size_t decisions_ = 0;
  std::vector<std::int8_t> value_;
  std::vector<Literal> trail_;
  std::vector<Level> levels_;
};

}  // namespace cnf

inline constexpr std::size_t kDefaultDecisionBudget = 1'000'000;

// The built-in checker: CNF encoding plus DPLL.
class DpllOracle final : public ConsistencyOracle {
 public:
  explicit DpllOracle(std::size_t decision_budget = kDefaultDecisionBudget) : budget_(decision_budget) {}

  std::unique_ptr<ConsistencyOracle> clone() const override { return std::make_unique<DpllOracle>(budget_); }
  std::string name() const override { return "dpll"; }

 protected:
  Consistency do_check(std::span<const Sentence> sentences) override {
    cnf::Encoder enc;
    for (const auto& s : sentences) enc.add(s);
    const auto f = enc.take();
    add_clauses(f.clauses.size());
    cnf::DpllSolver solver(f, budget_);
    return solver.solve() ? Consistency::Consistent : Consistency::Inconsistent;
  }

 private:
  std::size_t budget_;
};

// Exhaustive truth-table oracle. Sentences that are single literals fix their
// atom up front; every remaining atom is enumerated, 64 rows at a time.
class TruthTableOracle final : public ConsistencyOracle {
 public:
  explicit TruthTableOracle(std::size_t max_free_atoms = 24) : max_free_(max_free_atoms) {}

  std::unique_ptr<ConsistencyOracle> clone() const override { return std::make_unique<TruthTableOracle>(max_free_); }
  std::string name() const override { return "truth_table"; }

 protected:
  Consistency do_check(std::span<const Sentence> sentences) override {
    add_clauses(sentences.size());
    std::unordered_map<std::string, bool> fixed;
    std::vector<const Sentence*> rest;
    for (const auto& s : sentences) {
      if (s.connective() == Connective::True) continue;
      if (s.connective() == Connective::False) return Consistency::Inconsistent;
      if (s.is_literal()) {
        const bool value = s.is_atom();
        const auto& atom_name = value ? s.name() : s.operand().name();
        auto [it, inserted] = fixed.try_emplace(atom_name, value);
        if (!inserted && it->second != value) return Consistency::Inconsistent;
        continue;
      }
      rest.push_back(&s);
    }

    std::unordered_map<std::string, std::size_t> free_index;
    std::vector<Node> nodes;
    std::vector<std::size_t> roots;
    for (const auto* s : rest) roots.push_back(compile(*s, fixed, free_index, nodes));
    const std::size_t n = free_index.size();
    if (n > max_free_) throw ResourceLimitError("truth table over " + std::to_string(n) + " free atoms exceeds the bound");

    // Atom j < 6 varies inside a 64-row block; atom j >= 6 is bit (j-6) of the block number.
    static constexpr std::uint64_t kLow[6] = {0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
                                              0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
    const std::size_t rows = std::size_t{1} << n;
    const std::uint64_t valid = rows >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << rows) - 1);
    const std::size_t blocks = rows >= 64 ? rows / 64 : 1;
    std::vector<std::uint64_t> pattern(n);
    for (std::size_t b = 0; b < blocks; ++b) {
      for (std::size_t j = 0; j < n; ++j) {
        pattern[j] = j < 6 ? kLow[j] : (((b >> (j - 6)) & 1U) ? ~std::uint64_t{0} : 0);
      }
      std::uint64_t acc = valid;
      for (auto r : roots) {
        acc &= eval(nodes, r, pattern);
        if (!acc) break;
      }
      if (acc) return Consistency::Consistent;
    }
    return Consistency::Inconsistent;
  }

 private:
  struct Node {
    Connective op;
    std::size_t atom = 0;
    std::size_t left = 0;
    std::size_t right = 0;
  };

  static std::size_t compile(const Sentence& s, const std::unordered_map<std::string, bool>& fixed,
                             std::unordered_map<std::string, std::size_t>& free_index, std::vector<Node>& nodes) {
    Node node{s.connective()};
    switch (s.connective()) {
      case Connective::True:
      case Connective::False: break;
      case Connective::Atom: {
        if (auto it = fixed.find(s.name()); it != fixed.end()) {
          node.op = it->second ? Connective::True : Connective::False;
        } else {
          node.atom = free_index.try_emplace(s.name(), free_index.size()).first->second;
        }
        break;
      }
      case Connective::Not: node.left = compile(s.operand(), fixed, free_index, nodes); break;
      default:
        node.left = compile(s.lhs(), fixed, free_index, nodes);
        node.right = compile(s.rhs(), fixed, free_index, nodes);
    }
    nodes.push_back(node);
    return nodes.size() - 1;
  }

  static std::uint64_t eval(const std::vector<Node>& nodes, std::size_t i, const std::vector<std::uint64_t>& pattern) {
    const Node& n = nodes[i];
    switch (n.op) {
      case Connective::False: return 0;
      case Connective::True: return ~std::uint64_t{0};
      case Connective::Atom: return pattern[n.atom];
      case Connective::Not: return ~eval(nodes, n.left, pattern);
      case Connective::And: return eval(nodes, n.left, pattern) & eval(nodes, n.right, pattern);
      case Connective::Or: return eval(nodes, n.left, pattern) | eval(nodes, n.right, pattern);
      case Connective::Implies: return ~eval(nodes, n.left, pattern) | eval(nodes, n.right, pattern);
      case Connective::Iff: return ~(eval(nodes, n.left, pattern) ^ eval(nodes, n.right, pattern));
    }
    return 0;
  }

  std::size_t max_free_;
};

// sentences |= goal  iff  sentences + {!goal} is inconsistent
inline bool check_entailed(ConsistencyOracle& oracle, std::span<const Sentence> sentences, const Sentence& goal) {
  std::vector<Sentence> all(sentences.begin(), sentences.end());
  all.push_back(neg(goal));
  return oracle.check(all) == Consistency::Inconsistent;
}

// SD + OBS + MEAS + {ok(c) | c in ok} + {!ok(c) | c in nok}
inline std::vector<Sentence> encode_dpi(const Dpi& dpi, ComponentSet ok, ComponentSet nok) {
  if (ok.intersects(nok)) throw PreconditionError("ok and nok assumption sets must be disjoint");
  if (!(ok | nok).is_subset_of(dpi.all_components())) throw PreconditionError("assumption outside COMPS");
  std::vector<Sentence> out;
  out.reserve(dpi.size() * 2 + dpi.background().size() + dpi.obs().size() + dpi.meas().size());
  for (const auto& c : dpi.components()) out.push_back(implies(atom(ok_atom_name(c.name)), dpi.behavior(c.id)));
  out.insert(out.end(), dpi.background().begin(), dpi.background().end());
  out.insert(out.end(), dpi.obs().begin(), dpi.obs().end());
  out.insert(out.end(), dpi.meas().begin(), dpi.meas().end());
  for (auto c : ok) out.push_back(atom(ok_atom_name(dpi.components()[c].name)));
  for (auto c : nok) out.push_back(neg(atom(ok_atom_name(dpi.components()[c].name))));
  return out;
}

}  // namespace mbd
