#pragma once

// Brute-force reference computations shared by the unit and acceptance tests.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "sgner/cliques.hpp"

namespace sgner::test {

/// Maximal cliques by checking all 2^n vertex subsets (isolated vertices
/// included as singletons), in the same order as maximal_cliques.
inline std::vector<std::vector<std::size_t>> brute_force_cliques(const UndirectedGraph& g) {
  const std::size_t n = g.size();
  const std::uint32_t full = n ? (1u << n) : 0u;
  auto is_clique = [&](std::uint32_t m) {
    for (std::size_t u = 0; u < n; ++u)
      if (m >> u & 1u)
        for (std::size_t v = u + 1; v < n; ++v)
          if ((m >> v & 1u) && !g.connected(u, v)) return false;
    return true;
  };
  std::vector<char> clique(full, 0);
  for (std::uint32_t m = 1; m < full; ++m) clique[m] = is_clique(m);
  std::vector<std::vector<std::size_t>> out;
  for (std::uint32_t m = 1; m < full; ++m) {
    if (!clique[m]) continue;
    bool maximal = true;
    for (std::size_t v = 0; v < n && maximal; ++v)
      if (!(m >> v & 1u) && clique[m | (1u << v)]) maximal = false;
    if (!maximal) continue;
    std::vector<std::size_t> c;
    for (std::size_t v = 0; v < n; ++v)
      if (m >> v & 1u) c.push_back(v);
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.front() != b.front()) return a.front() < b.front();
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

}  // namespace sgner::test
