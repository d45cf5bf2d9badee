#include "sgner/cliques.hpp"

#include <algorithm>
#include <stdexcept>

namespace sgner {

void UndirectedGraph::add_edge(std::size_t u, std::size_t v) {
  if (u >= size() || v >= size()) throw std::out_of_range("add_edge: vertex out of range");
  if (u == v) throw std::invalid_argument("add_edge: self-loop");
  adj_[u][v] = adj_[v][u] = 1;
}

std::size_t UndirectedGraph::degree(std::size_t u) const {
  return static_cast<std::size_t>(std::count(adj_[u].begin(), adj_[u].end(), 1));
}

std::vector<std::pair<std::size_t, std::size_t>> UndirectedGraph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t u = 0; u < size(); ++u)
    for (std::size_t v = u + 1; v < size(); ++v)
      if (adj_[u][v]) out.emplace_back(u, v);
  return out;
}

namespace {

using Set = std::vector<std::size_t>;

struct BronKerbosch {
  const UndirectedGraph& g;
  std::vector<Set> out;

  Set neighbours_in(const Set& s, std::size_t v) const {
    Set r;
    for (std::size_t u : s)
      if (g.connected(u, v)) r.push_back(u);
    return r;
  }

  void run(Set& r, Set p, Set x) {
    if (p.empty() && x.empty()) {
      Set c = r;
      std::sort(c.begin(), c.end());
      out.push_back(std::move(c));
      return;
    }
    // pivot: vertex of P ∪ X with most neighbours in P
    std::size_t pivot = 0, best = 0;
    bool have = false;
    for (const Set* s : {&p, &x})
      for (std::size_t u : *s) {
        std::size_t cnt = 0;
        for (std::size_t w : p) cnt += g.connected(u, w);
        if (!have || cnt > best) {
          pivot = u;
          best = cnt;
          have = true;
        }
      }
    Set candidates;
    for (std::size_t v : p)
      if (!g.connected(pivot, v)) candidates.push_back(v);
    for (std::size_t v : candidates) {
      r.push_back(v);
      run(r, neighbours_in(p, v), neighbours_in(x, v));
      r.pop_back();
      p.erase(std::find(p.begin(), p.end(), v));
      x.push_back(v);
    }
  }
};

}  // namespace

std::vector<std::vector<std::size_t>> maximal_cliques(const UndirectedGraph& g) {
  BronKerbosch bk{g, {}};
  Set r, p(g.size()), x;
  for (std::size_t v = 0; v < g.size(); ++v) p[v] = v;
  if (!p.empty()) bk.run(r, std::move(p), std::move(x));
  std::sort(bk.out.begin(), bk.out.end(), [](const Set& a, const Set& b) {
    if (a.front() != b.front()) return a.front() < b.front();
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return bk.out;
}

}  // namespace sgner
