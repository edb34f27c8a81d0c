#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace cluspt {

using VertexId = std::int32_t;
inline constexpr VertexId kNoVertex = -1;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Edge {
  VertexId u;
  VertexId v;
  double w;
};

struct Point {
  double x;
  double y;
};

struct Neighbor {
  VertexId vertex;
  double w;
};

/// Undirected graph with non-negative weights. Either an explicit edge list
/// with adjacency index, or a complete Euclidean graph stored as coordinates
/// whose weights are computed on demand.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  /// Validates ids, weights, self-loops and duplicate pairs; throws ValidationError.
  static WeightedGraph from_edges(std::size_t n, std::vector<Edge> edges);
  static WeightedGraph euclidean(std::vector<Point> coords);

  std::size_t vertex_count() const noexcept { return n_; }
  bool is_euclidean() const noexcept { return euclidean_; }

  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const Point> coords() const noexcept { return coords_; }

  /// Explicit graphs only.
  std::span<const Neighbor> adjacency(VertexId v) const noexcept {
    return {adj_.data() + adj_offset_[v], adj_.data() + adj_offset_[v + 1]};
  }

  double euclidean_weight(VertexId u, VertexId v) const noexcept {
    const Point a = coords_[u];
    const Point b = coords_[v];
    return std::hypot(a.x - b.x, a.y - b.y);
  }

  /// Weight of edge (u,v), or +inf if absent. O(deg) for explicit graphs.
  double weight(VertexId u, VertexId v) const;

  /// Calls f(neighbor, weight) for every edge incident to v.
  template <class F>
  void for_each_neighbor(VertexId v, F&& f) const {
    if (euclidean_) {
      for (VertexId u = 0; u < static_cast<VertexId>(n_); ++u)
        if (u != v) f(u, euclidean_weight(v, u));
    } else {
      for (const Neighbor& nb : adjacency(v)) f(nb.vertex, nb.w);
    }
  }

 private:
  std::size_t n_ = 0;
  bool euclidean_ = false;
  std::vector<Edge> edges_;
  std::vector<Point> coords_;
  std::vector<std::size_t> adj_offset_;
  std::vector<Neighbor> adj_;
};

/// Rooted tree over an arbitrary vertex subset. Entries are indexed by local
/// position; `vertex[i]` is the graph id of local vertex i.
struct RootedTree {
  static constexpr std::int32_t kNoParent = -1;

  std::vector<VertexId> vertex;
  std::vector<std::int32_t> parent;
  std::vector<double> parent_weight;
  std::vector<double> dist;
  std::int32_t root = 0;

  std::size_t size() const noexcept { return vertex.size(); }

  /// Local index of graph vertex v, or -1. Linear scan.
  std::int32_t index_of(VertexId v) const noexcept;

  /// Graph id of v's parent, kNoVertex for the root.
  VertexId parent_vertex(std::int32_t local) const noexcept {
    return parent[local] == kNoParent ? kNoVertex : vertex[parent[local]];
  }
};

/// Shortest-path tree of G[restrict_to] rooted at source. Ties in tentative
/// distance are settled in ascending vertex id; relaxation is strict.
/// The tree's local order follows restrict_to. Throws DisconnectedSubgraph.
RootedTree dijkstra_spt(const WeightedGraph& graph, std::span<const VertexId> restrict_to,
                        VertexId source);

/// Sum of root distances.
double tree_cost(const RootedTree& tree);

/// Orients an undirected spanning tree over vertices [0, n) away from root.
/// Throws NotATree.
RootedTree dfs_orient(std::size_t n, std::span<const Edge> edges, VertexId root);

/// True when every dist equals the parent's dist plus the parent edge weight,
/// with exactly one root at distance 0 and no cycles.
bool is_consistent(const RootedTree& tree);

}  // namespace cluspt
