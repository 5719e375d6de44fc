#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mbd/component_set.hpp"

namespace mbd {

// All k-subsets of {0..n-1}, in lexicographic order of their ascending
// element sequences.
inline std::vector<ComponentSet> subsets_of_size(std::size_t n, std::size_t k) {
  std::vector<ComponentSet> out;
  if (k > n) return out;
  std::vector<ComponentIndex> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    ComponentSet s;
    for (auto i : idx) s.insert(i);
    out.push_back(s);
    // advance to the next combination
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

}  // namespace mbd
