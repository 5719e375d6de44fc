#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace mbd {

enum class Connective : std::uint8_t { False, True, Atom, Not, And, Or, Implies, Iff };

// Immutable propositional formula over named atoms. Copies share structure.
class Sentence {
 public:
  Sentence() : Sentence(make(Connective::True, {}, {}, {})) {}

  static Sentence constant(bool value) { return make(value ? Connective::True : Connective::False, {}, {}, {}); }
  static Sentence atom(std::string name) {
    if (name.empty()) throw std::invalid_argument("atom name must not be empty");
    return make(Connective::Atom, std::move(name), {}, {});
  }
  static Sentence negation(Sentence s) { return make(Connective::Not, {}, std::move(s.node_), {}); }
  static Sentence conjunction(Sentence a, Sentence b) { return binary(Connective::And, std::move(a), std::move(b)); }
  static Sentence disjunction(Sentence a, Sentence b) { return binary(Connective::Or, std::move(a), std::move(b)); }
  static Sentence implication(Sentence a, Sentence b) { return binary(Connective::Implies, std::move(a), std::move(b)); }
  static Sentence equivalence(Sentence a, Sentence b) { return binary(Connective::Iff, std::move(a), std::move(b)); }

  Connective connective() const noexcept { return node_->op; }
  bool is_atom() const noexcept { return node_->op == Connective::Atom; }
  bool is_constant() const noexcept { return node_->op == Connective::True || node_->op == Connective::False; }
  // atom or negated atom
  bool is_literal() const noexcept { return is_atom() || (node_->op == Connective::Not && operand().is_atom()); }

  // Precondition: is_atom().
  const std::string& name() const noexcept { return node_->name; }
  // Operand of a negation, or left side of a binary connective.
  Sentence operand() const { return Sentence(node_->left); }
  Sentence lhs() const { return Sentence(node_->left); }
  Sentence rhs() const { return Sentence(node_->right); }

  bool evaluate(const std::function<bool(const std::string&)>& value_of) const {
    switch (node_->op) {
      case Connective::False: return false;
      case Connective::True: return true;
      case Connective::Atom: return value_of(node_->name);
      case Connective::Not: return !operand().evaluate(value_of);
      case Connective::And: return lhs().evaluate(value_of) && rhs().evaluate(value_of);
      case Connective::Or: return lhs().evaluate(value_of) || rhs().evaluate(value_of);
      case Connective::Implies: return !lhs().evaluate(value_of) || rhs().evaluate(value_of);
      case Connective::Iff: return lhs().evaluate(value_of) == rhs().evaluate(value_of);
    }
    return false;
  }

  void collect_atoms(std::set<std::string>& out) const {
    switch (node_->op) {
      case Connective::False:
      case Connective::True: return;
      case Connective::Atom: out.insert(node_->name); return;
      case Connective::Not: operand().collect_atoms(out); return;
      default:
        lhs().collect_atoms(out);
        rhs().collect_atoms(out);
    }
  }

  std::set<std::string> atoms() const {
    std::set<std::string> out;
    collect_atoms(out);
    return out;
  }

  // Negation normal form: only and/or/not, negation on atoms only, constants
  // folded away unless the whole sentence is constant.
  Sentence to_nnf() const { return nnf(*this, true); }

  // Infix rendering with the minimal parentheses needed to parse back into
  // the same tree. Operators: ! & | -> <->, -> is right-associative.
  std::string to_string() const {
    std::string out;
    print(out, *this);
    return out;
  }

  friend bool operator==(const Sentence& a, const Sentence& b) { return structurally_equal(a.node_.get(), b.node_.get()); }

  friend std::ostream& operator<<(std::ostream& os, const Sentence& s) { return os << s.to_string(); }

  // Binding strength used by the printer and the parser.
  static int precedence(Connective c) noexcept {
    switch (c) {
      case Connective::Iff: return 1;
      case Connective::Implies: return 2;
      case Connective::Or: return 3;
      case Connective::And: return 4;
      case Connective::Not: return 5;
      default: return 6;
    }
  }

 private:
  struct Node {
    Connective op;
    std::string name;
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
  };

  explicit Sentence(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static Sentence make(Connective op, std::string name, std::shared_ptr<const Node> l, std::shared_ptr<const Node> r) {
    return Sentence(std::make_shared<const Node>(Node{op, std::move(name), std::move(l), std::move(r)}));
  }
  static Sentence binary(Connective op, Sentence a, Sentence b) { return make(op, {}, std::move(a.node_), std::move(b.node_)); }

  static bool structurally_equal(const Node* a, const Node* b) {
    if (a == b) return true;
    if (a->op != b->op) return false;
    switch (a->op) {
      case Connective::False:
      case Connective::True: return true;
      case Connective::Atom: return a->name == b->name;
      case Connective::Not: return structurally_equal(a->left.get(), b->left.get());
      default: return structurally_equal(a->left.get(), b->left.get()) && structurally_equal(a->right.get(), b->right.get());
    }
  }

  static Sentence fold_and(Sentence a, Sentence b) {
    if (a.connective() == Connective::False || b.connective() == Connective::False) return constant(false);
    if (a.connective() == Connective::True) return b;
    if (b.connective() == Connective::True) return a;
    return conjunction(std::move(a), std::move(b));
  }
  static Sentence fold_or(Sentence a, Sentence b) {
    if (a.connective() == Connective::True || b.connective() == Connective::True) return constant(true);
    if (a.connective() == Connective::False) return b;
    if (b.connective() == Connective::False) return a;
    return disjunction(std::move(a), std::move(b));
  }

  static Sentence nnf(const Sentence& s, bool positive) {
    switch (s.connective()) {
      case Connective::False: return constant(!positive);
      case Connective::True: return constant(positive);
      case Connective::Atom: return positive ? s : negation(s);
      case Connective::Not: return nnf(s.operand(), !positive);
      case Connective::And:
        return positive ? fold_and(nnf(s.lhs(), true), nnf(s.rhs(), true))
                        : fold_or(nnf(s.lhs(), false), nnf(s.rhs(), false));
      case Connective::Or:
        return positive ? fold_or(nnf(s.lhs(), true), nnf(s.rhs(), true))
                        : fold_and(nnf(s.lhs(), false), nnf(s.rhs(), false));
      case Connective::Implies:
        return positive ? fold_or(nnf(s.lhs(), false), nnf(s.rhs(), true))
                        : fold_and(nnf(s.lhs(), true), nnf(s.rhs(), false));
      case Connective::Iff:
        if (positive) {
          return fold_and(fold_or(nnf(s.lhs(), false), nnf(s.rhs(), true)),
                          fold_or(nnf(s.lhs(), true), nnf(s.rhs(), false)));
        }
        return fold_or(fold_and(nnf(s.lhs(), true), nnf(s.rhs(), false)),
                       fold_and(nnf(s.lhs(), false), nnf(s.rhs(), true)));
    }
    return s;
  }

  static const char* symbol(Connective c) {
    switch (c) {
      case Connective::And: return " & ";
      case Connective::Or: return " | ";
      case Connective::Implies: return " -> ";
      case Connective::Iff: return " <-> ";
      default: return "";
    }
  }

  static void print_child(std::string& out, const Sentence& child, bool parens) {
    if (parens) out += '(';
    print(out, child);
    if (parens) out += ')';
  }

  static void print(std::string& out, const Sentence& s) {
    const Connective op = s.connective();
    switch (op) {
      case Connective::False: out += "false"; return;
      case Connective::True: out += "true"; return;
      case Connective::Atom: out += s.name(); return;
      case Connective::Not:
        out += '!';
        print_child(out, s.operand(), precedence(s.operand().connective()) < precedence(Connective::Not));
        return;
      default: break;
    }
    const int p = precedence(op);
    const int lp = precedence(s.lhs().connective());
    const int rp = precedence(s.rhs().connective());
    const bool right_assoc = op == Connective::Implies;
    print_child(out, s.lhs(), right_assoc ? lp <= p : lp < p);
    out += symbol(op);
    print_child(out, s.rhs(), right_assoc ? rp < p : rp <= p);
  }

  std::shared_ptr<const Node> node_;
};

// Short builders, mostly used in tests and fixtures.
inline Sentence atom(std::string name) { return Sentence::atom(std::move(name)); }
inline Sentence neg(Sentence s) { return Sentence::negation(std::move(s)); }
inline Sentence conj(Sentence a, Sentence b) { return Sentence::conjunction(std::move(a), std::move(b)); }
inline Sentence disj(Sentence a, Sentence b) { return Sentence::disjunction(std::move(a), std::move(b)); }
inline Sentence implies(Sentence a, Sentence b) { return Sentence::implication(std::move(a), std::move(b)); }
inline Sentence iff(Sentence a, Sentence b) { return Sentence::equivalence(std::move(a), std::move(b)); }

}  // namespace mbd
