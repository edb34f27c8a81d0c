#pragma once

// Fixtures and independent oracles shared by the unit and acceptance tests.
// Nothing here calls into the solver code it is used to check.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "cluspt/graph.hpp"
#include "cluspt/instance.hpp"
#include "cluspt/rng.hpp"

namespace cluspt::testing {

/// Toy instance: clusters {0,1} and {2,3}, edges (0,1,1) (2,3,1) (1,2,2) (0,3,5), root 0.
inline ClusteredInstance toy_t1() {
  auto g = WeightedGraph::from_edges(4, {{0, 1, 1}, {2, 3, 1}, {1, 2, 2}, {0, 3, 5}});
  return ClusteredInstance::create("T1", std::move(g), {{0, 1}, {2, 3}}, 0);
}

/// Random feasible explicit instance: each cluster gets a random spanning tree
/// plus extra chords, clusters are chained so the cluster graph is connected,
/// and extra inter-cluster edges are sprinkled in. Integer weights in [1, 20]
/// make ties common.
inline ClusteredInstance random_explicit(std::size_t n, std::size_t k, std::uint64_t seed,
                                         double intra_density = 0.3,
                                         double inter_density = 0.25) {
  Rng rng(seed);
  std::vector<VertexId> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  std::vector<std::vector<VertexId>> clusters(k);
  for (std::size_t i = 0; i < n; ++i) clusters[i < k ? i : rng.index(k)].push_back(perm[i]);

  std::vector<std::vector<char>> used(n, std::vector<char>(n, 0));
  std::vector<Edge> edges;
  auto add = [&](VertexId u, VertexId v) {
    if (u == v || used[u][v]) return;
    used[u][v] = used[v][u] = 1;
    edges.push_back({u, v, static_cast<double>(1 + rng.index(20))});
  };
  for (const auto& c : clusters) {
    for (std::size_t i = 1; i < c.size(); ++i) add(c[i], c[rng.index(i)]);
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j)
        if (rng.bernoulli(intra_density)) add(c[i], c[j]);
  }
  for (std::size_t c = 1; c < k; ++c) {
    const auto& a = clusters[rng.index(c)];
    const auto& b = clusters[c];
    add(a[rng.index(a.size())], b[rng.index(b.size())]);
  }
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b)
      for (VertexId u : clusters[a])
        for (VertexId v : clusters[b])
          if (rng.bernoulli(inter_density)) add(u, v);

  const VertexId root = static_cast<VertexId>(rng.index(n));
  return ClusteredInstance::create("rand-" + std::to_string(seed),
                                   WeightedGraph::from_edges(n, std::move(edges)),
                                   std::move(clusters), root);
}

/// All-pairs distances inside G[subset] by Floyd-Warshall, indexed by
/// position in `subset`.
inline std::vector<std::vector<double>> floyd_warshall(const WeightedGraph& g,
                                                       const std::vector<VertexId>& subset) {
  const std::size_t m = subset.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> d(m, std::vector<double>(m, inf));
  for (std::size_t i = 0; i < m; ++i) {
    d[i][i] = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      if (i != j) d[i][j] = std::min(d[i][j], g.weight(subset[i], subset[j]));
  }
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) d[i][j] = std::min(d[i][j], d[i][p] + d[p][j]);
  return d;
}

/// Sum of root distances of an undirected spanning tree given as an edge
/// list, or +inf when the edges do not form a spanning tree.
inline double edge_tree_cost(std::size_t n, const std::vector<Edge>& edges, VertexId root) {
  if (edges.size() + 1 != n) return std::numeric_limits<double>::infinity();
  std::vector<std::vector<std::pair<VertexId, double>>> adj(n);
  for (const Edge& e : edges) {
    adj[e.u].push_back({e.v, e.w});
    adj[e.v].push_back({e.u, e.w});
  }
  std::vector<double> dist(n, -1.0);
  std::vector<VertexId> stack{root};
  dist[root] = 0.0;
  std::size_t seen = 1;
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    for (auto [u, w] : adj[v]) {
      if (dist[u] >= 0.0) continue;
      dist[u] = dist[v] + w;
      ++seen;
      stack.push_back(u);
    }
  }
  if (seen != n) return std::numeric_limits<double>::infinity();
  return std::accumulate(dist.begin(), dist.end(), 0.0);
}

/// True when every cluster induces a connected subgraph of the edge set.
inline bool clusters_connected(const ClusteredInstance& inst, const std::vector<Edge>& edges) {
  std::vector<VertexId> parent(inst.vertex_count());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<VertexId(VertexId)> find = [&](VertexId x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (const Edge& e : edges)
    if (inst.cluster_of(e.u) == inst.cluster_of(e.v)) parent[find(e.u)] = find(e.v);
  for (const auto& c : inst.clusters())
    for (VertexId v : c)
      if (find(v) != find(c.front())) return false;
  return true;
}

/// CluSPT optimum straight from the definition: every (n-1)-subset of edges
/// that is a spanning tree with connected clusters. Only for tiny graphs.
inline double definitional_optimum(const ClusteredInstance& inst) {
  const auto all = inst.graph().edges();
  const std::size_t n = inst.vertex_count();
  const std::size_t m = all.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<Edge> chosen;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (chosen.size() + 1 == n) {
      if (clusters_connected(inst, chosen))
        best = std::min(best, edge_tree_cost(n, chosen, inst.root()));
      return;
    }
    if (i == m || m - i < n - 1 - chosen.size()) return;
    chosen.push_back(all[i]);
    rec(i + 1);
    chosen.pop_back();
    rec(i + 1);
  };
  rec(0);
  return best;
}

/// Cost of the clustered tree given local roots and a cluster parent array,
/// entering each child cluster through its cheapest port. Computed from
/// Floyd-Warshall distances only.
inline double independent_arborescence_cost(const ClusteredInstance& inst,
                                            const std::vector<VertexId>& roots,
                                            const std::vector<std::int32_t>& parent) {
  const std::size_t k = inst.cluster_count();
  std::vector<std::vector<std::vector<double>>> fw(k);
  std::vector<std::vector<VertexId>> members(k);
  for (std::size_t c = 0; c < k; ++c) {
    members[c] = inst.clusters()[c];
    fw[c] = floyd_warshall(inst.graph(), members[c]);
  }
  auto pos = [&](std::size_t c, VertexId v) {
    return static_cast<std::size_t>(std::find(members[c].begin(), members[c].end(), v) -
                                    members[c].begin());
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d(k, inf);
  d[0] = 0.0;
  // Parents may appear after children, so relax until settled.
  for (std::size_t round = 0; round < k; ++round)
    for (std::size_t c = 1; c < k; ++c) {
      const auto p = static_cast<std::size_t>(parent[c]);
      if (d[p] == inf) continue;
      double best = inf;
      for (VertexId x : members[p]) {
        const double w = inst.graph().weight(x, roots[c]);
        if (w == inf) continue;
        best = std::min(best, d[p] + fw[p][pos(p, roots[p])][pos(p, x)] + w);
      }
      d[c] = best;
    }
  double total = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const auto r = pos(c, roots[c]);
    for (std::size_t j = 0; j < members[c].size(); ++j) total += d[c] + fw[c][r][j];
  }
  return total;
}

/// Calls f(parent) for every arborescence rooted at cluster 0 whose arcs
/// (parent[c] -> c) all satisfy has_arc.
inline void for_each_arborescence(std::size_t k,
                                  const std::function<bool(std::int32_t, std::int32_t)>& has_arc,
                                  const std::function<void(const std::vector<std::int32_t>&)>& f) {
  std::vector<std::int32_t> parent(k, -1);
  std::function<void(std::size_t)> rec = [&](std::size_t c) {
    if (c == k) {
      for (std::size_t v = 1; v < k; ++v) {
        std::size_t x = v, steps = 0;
        while (x != 0 && steps++ <= k) x = static_cast<std::size_t>(parent[x]);
        if (x != 0) return;
      }
      f(parent);
      return;
    }
    for (std::size_t t = 0; t < k; ++t) {
      if (t == c || !has_arc(static_cast<std::int32_t>(t), static_cast<std::int32_t>(c))) continue;
      parent[c] = static_cast<std::int32_t>(t);
      rec(c + 1);
    }
    parent[c] = -1;
  };
  if (k == 1) {
    f(parent);
    return;
  }
  rec(1);
}

}  // namespace cluspt::testing
