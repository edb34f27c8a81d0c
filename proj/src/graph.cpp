#include "cluspt/graph.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_set>

#include "cluspt/error.hpp"
#include "spt_kernel.hpp"

namespace cluspt {

namespace {

std::string vertex_text(VertexId v) { return std::to_string(v + 1); }

}  // namespace

WeightedGraph WeightedGraph::from_edges(std::size_t n, std::vector<Edge> edges) {
  WeightedGraph g;
  g.n_ = n;
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges.size() * 2);
  std::vector<std::size_t> degree(n, 0);
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || static_cast<std::size_t>(e.u) >= n ||
        static_cast<std::size_t>(e.v) >= n)
      throw ValidationError("edge (" + vertex_text(e.u) + ", " + vertex_text(e.v) +
                            ") has a vertex id out of range");
    if (e.u == e.v) throw ValidationError("self-loop at vertex " + vertex_text(e.u));
    if (!(e.w >= 0.0) || !std::isfinite(e.w))
      throw ValidationError("edge (" + vertex_text(e.u) + ", " + vertex_text(e.v) +
                            ") has an invalid weight");
    const auto lo = static_cast<std::uint64_t>(std::min(e.u, e.v));
    const auto hi = static_cast<std::uint64_t>(std::max(e.u, e.v));
    if (!seen.insert(lo << 32 | hi).second)
      throw ValidationError("duplicate edge (" + vertex_text(e.u) + ", " + vertex_text(e.v) + ")");
    ++degree[e.u];
    ++degree[e.v];
  }

  g.adj_offset_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) g.adj_offset_[v + 1] = g.adj_offset_[v] + degree[v];
  g.adj_.resize(g.adj_offset_[n]);
  std::vector<std::size_t> fill(g.adj_offset_.begin(), g.adj_offset_.end() - 1);
  for (const Edge& e : edges) {
    g.adj_[fill[e.u]++] = {e.v, e.w};
    g.adj_[fill[e.v]++] = {e.u, e.w};
  }
  for (std::size_t v = 0; v < n; ++v)
    std::sort(g.adj_.begin() + g.adj_offset_[v], g.adj_.begin() + g.adj_offset_[v + 1],
              [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });
  g.edges_ = std::move(edges);
  return g;
}

WeightedGraph WeightedGraph::euclidean(std::vector<Point> coords) {
  for (const Point& p : coords)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw ValidationError("non-finite coordinate");
  WeightedGraph g;
  g.n_ = coords.size();
  g.euclidean_ = true;
  g.coords_ = std::move(coords);
  return g;
}

double WeightedGraph::weight(VertexId u, VertexId v) const {
  if (u == v) return kInfinity;
  if (euclidean_) return euclidean_weight(u, v);
  const auto adj = adjacency(u);
  const auto it = std::lower_bound(adj.begin(), adj.end(), v,
                                   [](const Neighbor& a, VertexId x) { return a.vertex < x; });
  return it != adj.end() && it->vertex == v ? it->w : kInfinity;
}

std::int32_t RootedTree::index_of(VertexId v) const noexcept {
  const auto it = std::find(vertex.begin(), vertex.end(), v);
  return it == vertex.end() ? -1 : static_cast<std::int32_t>(it - vertex.begin());
}

RootedTree dijkstra_spt(const WeightedGraph& graph, std::span<const VertexId> restrict_to,
                        VertexId source) {
  std::vector<std::int32_t> local(graph.vertex_count(), -1);
  std::int32_t source_local = -1;
  for (std::size_t i = 0; i < restrict_to.size(); ++i) {
    const VertexId v = restrict_to[i];
    if (v < 0 || static_cast<std::size_t>(v) >= graph.vertex_count())
      throw ValidationError("vertex id out of range");
    if (local[v] >= 0) throw ValidationError("duplicate vertex in subset");
    local[v] = static_cast<std::int32_t>(i);
    if (v == source) source_local = static_cast<std::int32_t>(i);
  }
  if (source_local < 0) throw ValidationError("source is not in the subset");

  RootedTree t;
  t.vertex.assign(restrict_to.begin(), restrict_to.end());
  t.root = source_local;
  detail::restricted_spt(
      graph, restrict_to, source_local, [&](VertexId v) { return local[v]; }, t.parent,
      t.parent_weight, t.dist);
  return t;
}

double tree_cost(const RootedTree& tree) {
  return std::accumulate(tree.dist.begin(), tree.dist.end(), 0.0);
}

RootedTree dfs_orient(std::size_t n, std::span<const Edge> edges, VertexId root) {
  if (root < 0 || static_cast<std::size_t>(root) >= n) throw NotATree("root out of range");
  if (edges.size() + 1 != n)
    throw NotATree("expected " + std::to_string(n == 0 ? 0 : n - 1) + " edges, got " +
                   std::to_string(edges.size()));

  std::vector<std::vector<std::pair<VertexId, double>>> adj(n);
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || static_cast<std::size_t>(e.u) >= n ||
        static_cast<std::size_t>(e.v) >= n || e.u == e.v)
      throw NotATree("invalid edge");
    adj[e.u].emplace_back(e.v, e.w);
    adj[e.v].emplace_back(e.u, e.w);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  RootedTree t;
  t.vertex.resize(n);
  std::iota(t.vertex.begin(), t.vertex.end(), 0);
  t.parent.assign(n, RootedTree::kNoParent);
  t.parent_weight.assign(n, 0.0);
  t.dist.assign(n, 0.0);
  t.root = root;

  std::vector<char> seen(n, 0);
  std::vector<VertexId> stack{root};
  seen[root] = 1;
  std::size_t visited = 1;
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    // Push in descending order so children are expanded in ascending id.
    for (auto it = adj[v].rbegin(); it != adj[v].rend(); ++it) {
      const auto [u, w] = *it;
      if (u == t.parent[v]) continue;
      if (seen[u]) throw NotATree("cycle through vertex " + vertex_text(u));
      seen[u] = 1;
      ++visited;
      t.parent[u] = v;
      t.parent_weight[u] = w;
      t.dist[u] = t.dist[v] + w;
      stack.push_back(u);
    }
  }
  if (visited != n) throw NotATree("edges do not connect all vertices");
  return t;
}

bool is_consistent(const RootedTree& tree) {
  const std::size_t n = tree.size();
  if (tree.parent.size() != n || tree.dist.size() != n || tree.parent_weight.size() != n)
    return false;
  if (tree.root < 0 || static_cast<std::size_t>(tree.root) >= n) return false;
  std::size_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (tree.parent[i] == RootedTree::kNoParent) {
      ++roots;
      if (static_cast<std::int32_t>(i) != tree.root || tree.dist[i] != 0.0) return false;
    } else if (tree.parent[i] < 0 || static_cast<std::size_t>(tree.parent[i]) >= n) {
      return false;
    }
  }
  if (roots != 1) return false;

  // Recompute distances root-to-leaf; a vertex whose chain never reaches the
  // root is part of a cycle.
  std::vector<std::vector<std::int32_t>> children(n);
  for (std::size_t i = 0; i < n; ++i)
    if (tree.parent[i] != RootedTree::kNoParent)
      children[tree.parent[i]].push_back(static_cast<std::int32_t>(i));
  std::vector<double> dist(n, 0.0);
  std::vector<std::int32_t> stack{tree.root};
  std::size_t reached = 0;
  while (!stack.empty()) {
    const std::int32_t v = stack.back();
    stack.pop_back();
    ++reached;
    for (std::int32_t c : children[v]) {
      dist[c] = dist[v] + tree.parent_weight[c];
      stack.push_back(c);
    }
  }
  if (reached != n) return false;
  for (std::size_t i = 0; i < n; ++i)
    if (dist[i] != tree.dist[i]) return false;
  return true;
}

}  // namespace cluspt
