#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iterator>
#include <string>
#include <vector>

#include "mbd/error.hpp"

namespace mbd {

// Dense component index inside one DPI (0..n-1).
using ComponentIndex = std::size_t;

inline constexpr std::size_t kMaxComponents = 64;

// A set of component indices. Iteration is always in ascending index order,
// which is the canonical order every engine uses for tie-breaking.
class ComponentSet {
 public:
  class iterator {
   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = ComponentIndex;
    using difference_type = std::ptrdiff_t;
    using pointer = const ComponentIndex*;
    using reference = ComponentIndex;

    iterator() = default;
    explicit iterator(std::uint64_t rest) : rest_(rest) {}

    ComponentIndex operator*() const { return static_cast<ComponentIndex>(std::countr_zero(rest_)); }
    iterator& operator++() {
      rest_ &= rest_ - 1;
      return *this;
    }
    iterator operator++(int) {
      iterator copy = *this;
      ++*this;
      return copy;
    }
    bool operator==(const iterator&) const = default;

   private:
    std::uint64_t rest_ = 0;
  };

  constexpr ComponentSet() = default;
  ComponentSet(std::initializer_list<ComponentIndex> items) {
    for (auto i : items) insert(i);
  }

  static constexpr ComponentSet from_bits(std::uint64_t bits) {
    ComponentSet s;
    s.bits_ = bits;
    return s;
  }

  // {0, 1, ..., n-1}
  static ComponentSet all(std::size_t n) {
    if (n > kMaxComponents) throw BoundExceededError("at most 64 components are supported");
    return from_bits(n == kMaxComponents ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1));
  }

  constexpr std::uint64_t bits() const noexcept { return bits_; }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(std::popcount(bits_)); }

  bool contains(ComponentIndex i) const noexcept { return i < kMaxComponents && ((bits_ >> i) & 1U); }

  void insert(ComponentIndex i) {
    if (i >= kMaxComponents) throw BoundExceededError("component index out of range");
    bits_ |= std::uint64_t{1} << i;
  }
  void erase(ComponentIndex i) noexcept {
    if (i < kMaxComponents) bits_ &= ~(std::uint64_t{1} << i);
  }

  ComponentSet with(ComponentIndex i) const {
    ComponentSet s = *this;
    s.insert(i);
    return s;
  }
  ComponentSet without(ComponentIndex i) const noexcept {
    ComponentSet s = *this;
    s.erase(i);
    return s;
  }

  bool is_subset_of(ComponentSet other) const noexcept { return (bits_ & ~other.bits_) == 0; }
  bool is_proper_subset_of(ComponentSet other) const noexcept { return is_subset_of(other) && bits_ != other.bits_; }
  bool intersects(ComponentSet other) const noexcept { return (bits_ & other.bits_) != 0; }

  friend ComponentSet operator|(ComponentSet a, ComponentSet b) noexcept { return from_bits(a.bits_ | b.bits_); }
  friend ComponentSet operator&(ComponentSet a, ComponentSet b) noexcept { return from_bits(a.bits_ & b.bits_); }
  friend ComponentSet operator-(ComponentSet a, ComponentSet b) noexcept { return from_bits(a.bits_ & ~b.bits_); }

  friend bool operator==(ComponentSet, ComponentSet) = default;

  iterator begin() const noexcept { return iterator(bits_); }
  iterator end() const noexcept { return iterator(0); }

  std::vector<ComponentIndex> to_vector() const { return {begin(), end()}; }

  // Smallest element; precondition: !empty().
  ComponentIndex front() const noexcept { return static_cast<ComponentIndex>(std::countr_zero(bits_)); }

 private:
  std::uint64_t bits_ = 0;
};

// Lexicographic comparison of the ascending element sequences.
inline bool lex_less(ComponentSet a, ComponentSet b) {
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
    if (*ia != *ib) return *ia < *ib;
  }
  return ia == a.end() && ib != b.end();
}

// Canonical order: cardinality first, then lexicographic.
inline bool canonical_less(ComponentSet a, ComponentSet b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return lex_less(a, b);
}

inline void sort_canonical(std::vector<ComponentSet>& sets) {
  std::sort(sets.begin(), sets.end(), canonical_less);
}

struct ComponentSetHash {
  std::size_t operator()(ComponentSet s) const noexcept { return std::hash<std::uint64_t>{}(s.bits()); }
};

// true iff some member of `family` is a subset of `s`
inline bool has_subset_in(ComponentSet s, const std::vector<ComponentSet>& family) {
  return std::any_of(family.begin(), family.end(), [s](ComponentSet f) { return f.is_subset_of(s); });
}

}  // namespace mbd
