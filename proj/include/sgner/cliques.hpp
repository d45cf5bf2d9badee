#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace sgner {

/// Undirected simple graph on vertices 0..n-1.
class UndirectedGraph {
 public:
  explicit UndirectedGraph(std::size_t n = 0) : adj_(n, std::vector<char>(n, 0)) {}

  std::size_t size() const { return adj_.size(); }
  void add_edge(std::size_t u, std::size_t v);
  bool connected(std::size_t u, std::size_t v) const { return adj_[u][v] != 0; }
  std::size_t degree(std::size_t u) const;
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

 private:
  std::vector<std::vector<char>> adj_;
};

/// Every maximal clique (Bron–Kerbosch with pivoting). Isolated vertices come
/// back as singletons. Each clique is sorted ascending; the list is ordered
/// by smallest member, then size, then lexicographically.
std::vector<std::vector<std::size_t>> maximal_cliques(const UndirectedGraph& g);

}  // namespace sgner
