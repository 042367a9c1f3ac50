#pragma once

#include "hopcirc/util/rng.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace hopcirc {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

/// Undirected graph on vertices 1..n plus a query pair.
struct ConnectivityInstance {
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t u = 1;
  std::size_t v = 1;

  void validate() const {
    const auto in_range = [&](std::size_t x) { return x >= 1 && x <= n; };
    if (!in_range(u) || !in_range(v)) throw std::invalid_argument("connectivity: query vertex out of range");
    for (const auto& [a, b] : edges) {
      if (!in_range(a) || !in_range(b)) throw std::invalid_argument("connectivity: edge endpoint out of range");
    }
  }

  /// Every vertex has degree exactly 2 and there are no self-loops or
  /// repeated edges.
  bool is_cycle_union() const {
    std::vector<std::size_t> deg(n + 1, 0);
    std::vector<std::pair<std::size_t, std::size_t>> seen;
    for (auto [a, b] : edges) {
      if (a == b || a < 1 || b < 1 || a > n || b > n) return false;
      ++deg[a];
      ++deg[b];
      seen.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) return false;
    return std::all_of(deg.begin() + 1, deg.end(), [](std::size_t d) { return d == 2; });
  }
};

inline bool oracle_connectivity(const ConnectivityInstance& g) {
  g.validate();
  UnionFind uf(g.n + 1);
  for (const auto& [a, b] : g.edges) uf.unite(a, b);
  return uf.find(g.u) == uf.find(g.v);
}

/// Breadth-first search from u; the cross-check for oracle_connectivity.
inline bool connected_bfs(const ConnectivityInstance& g) {
  g.validate();
  std::vector<std::vector<std::size_t>> adj(g.n + 1);
  for (const auto& [a, b] : g.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<std::uint8_t> seen(g.n + 1, 0);
  std::queue<std::size_t> q;
  q.push(g.u);
  seen[g.u] = 1;
  while (!q.empty()) {
    const std::size_t x = q.front();
    q.pop();
    for (std::size_t y : adj[x]) {
      if (!seen[y]) {
        seen[y] = 1;
        q.push(y);
      }
    }
  }
  return seen[g.v];
}

/// Vertices are shuffled and cut into cycles of length >= 3. The query is a
/// same-cycle pair with probability 1/2 (always, when there is one cycle).
inline ConnectivityInstance gen_connectivity(std::size_t n, SplitMix64& rng) {
  if (n < 3) throw std::invalid_argument("gen_connectivity: need at least 3 vertices");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 1);
  rng.shuffle(order);

  std::vector<std::size_t> cycle_of(n + 1);
  std::vector<std::vector<std::size_t>> cycles;
  ConnectivityInstance g;
  g.n = n;
  for (std::size_t start = 0; start < n;) {
    const std::size_t left = n - start;
    // A length that leaves either nothing or room for another cycle.
    std::size_t len = left;
    if (left >= 6) {
      len = static_cast<std::size_t>(rng.range(3, static_cast<std::int64_t>(left)));
      if (left - len > 0 && left - len < 3) len = left;
    }
    std::vector<std::size_t> cyc(order.begin() + start, order.begin() + start + len);
    for (std::size_t i = 0; i < len; ++i) {
      g.edges.emplace_back(cyc[i], cyc[(i + 1) % len]);
      cycle_of[cyc[i]] = cycles.size();
    }
    cycles.push_back(std::move(cyc));
    start += len;
  }
  rng.shuffle(g.edges);

  const bool same = cycles.size() == 1 || rng.coin();
  if (same) {
    const auto& c = cycles[rng.below(cycles.size())];
    g.u = c[rng.below(c.size())];
    g.v = c[rng.below(c.size())];
  } else {
    const std::size_t a = rng.below(cycles.size());
    std::size_t b = rng.below(cycles.size() - 1);
    if (b >= a) ++b;
    g.u = cycles[a][rng.below(cycles[a].size())];
    g.v = cycles[b][rng.below(cycles[b].size())];
  }
  return g;
}

/// `edge u v` triples followed by one `query u v` triple.
inline std::vector<std::string> connectivity_tokens(const ConnectivityInstance& g) {
  std::vector<std::string> t;
  for (const auto& [a, b] : g.edges) t.insert(t.end(), {"edge", std::to_string(a), std::to_string(b)});
  t.insert(t.end(), {"query", std::to_string(g.u), std::to_string(g.v)});
  return t;
}

}  // namespace hopcirc
