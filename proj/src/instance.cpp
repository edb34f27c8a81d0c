#include "cluspt/instance.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "cluspt/error.hpp"
#include "spt_kernel.hpp"

namespace cluspt {

namespace {

// Union-find over cluster ids for the cluster-graph connectivity check.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

ClusteredInstance ClusteredInstance::create(std::string name, WeightedGraph graph,
                                            std::vector<std::vector<VertexId>> clusters,
                                            VertexId root) {
  const std::size_t n = graph.vertex_count();
  if (n == 0) throw ValidationError("instance has no vertices");
  if (clusters.empty()) throw ValidationError("instance has no clusters");
  if (root < 0 || static_cast<std::size_t>(root) >= n)
    throw ValidationError("root " + std::to_string(root + 1) + " is not a vertex");

  std::vector<ClusterId> cluster_of(n, -1);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (clusters[c].empty()) throw ValidationError("cluster " + std::to_string(c + 1) + " is empty");
    for (VertexId v : clusters[c]) {
      if (v < 0 || static_cast<std::size_t>(v) >= n)
        throw ValidationError("cluster " + std::to_string(c + 1) + " lists unknown vertex " +
                              std::to_string(v + 1));
      if (cluster_of[v] >= 0)
        throw ValidationError("vertex " + std::to_string(v + 1) + " appears in clusters " +
                              std::to_string(cluster_of[v] + 1) + " and " +
                              std::to_string(c + 1));
      cluster_of[v] = static_cast<ClusterId>(c);
    }
  }
  for (std::size_t v = 0; v < n; ++v)
    if (cluster_of[v] < 0)
      throw ValidationError("vertex " + std::to_string(v + 1) + " belongs to no cluster");

  const ClusterId root_cluster = cluster_of[root];
  if (root_cluster != 0)
    std::rotate(clusters.begin(), clusters.begin() + root_cluster,
                clusters.begin() + root_cluster + 1);

  ClusteredInstance inst;
  inst.name_ = std::move(name);
  inst.graph_ = std::move(graph);
  inst.root_ = root;
  inst.cluster_of_.assign(n, 0);
  inst.local_index_.assign(n, 0);
  for (auto& members : clusters) std::sort(members.begin(), members.end());
  inst.clusters_ = std::move(clusters);
  for (std::size_t c = 0; c < inst.clusters_.size(); ++c)
    for (std::size_t i = 0; i < inst.clusters_[c].size(); ++i) {
      inst.cluster_of_[inst.clusters_[c][i]] = static_cast<ClusterId>(c);
      inst.local_index_[inst.clusters_[c][i]] = static_cast<std::int32_t>(i);
    }

  // Each G[C_i] must be connected; the complete Euclidean case always is.
  if (!inst.graph_.is_euclidean()) {
    std::vector<std::int32_t> parent;
    std::vector<double> parent_weight, dist;
    for (std::size_t c = 0; c < inst.clusters_.size(); ++c) {
      const auto members = inst.cluster(static_cast<ClusterId>(c));
      try {
        detail::restricted_spt(
            inst.graph_, members, 0,
            [&](VertexId v) {
              return inst.cluster_of_[v] == static_cast<ClusterId>(c) ? inst.local_index_[v] : -1;
            },
            parent, parent_weight, dist);
      } catch (const DisconnectedSubgraph&) {
        throw DisconnectedSubgraph("cluster " + std::to_string(c + 1) +
                                   " does not induce a connected subgraph");
      }
    }

    DisjointSets sets(inst.clusters_.size());
    std::size_t components = inst.clusters_.size();
    for (const Edge& e : inst.graph_.edges())
      if (inst.cluster_of_[e.u] != inst.cluster_of_[e.v] &&
          sets.unite(inst.cluster_of_[e.u], inst.cluster_of_[e.v]))
        --components;
    if (components != 1)
      throw DisconnectedClusterGraph("clusters are not connected by inter-cluster edges");
  }
  return inst;
}

bool ClusteredInstance::operator==(const ClusteredInstance& other) const {
  if (name_ != other.name_ || root_ != other.root_ || clusters_ != other.clusters_) return false;
  const WeightedGraph& a = graph_;
  const WeightedGraph& b = other.graph_;
  if (a.vertex_count() != b.vertex_count() || a.is_euclidean() != b.is_euclidean()) return false;
  if (a.is_euclidean()) {
    for (std::size_t i = 0; i < a.vertex_count(); ++i)
      if (a.coords()[i].x != b.coords()[i].x || a.coords()[i].y != b.coords()[i].y) return false;
    return true;
  }
  for (VertexId v = 0; v < static_cast<VertexId>(a.vertex_count()); ++v) {
    const auto x = a.adjacency(v);
    const auto y = b.adjacency(v);
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i].vertex != y[i].vertex || x[i].w != y[i].w) return false;
  }
  return true;
}

}  // namespace cluspt
