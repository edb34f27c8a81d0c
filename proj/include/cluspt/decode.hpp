#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "cluspt/graph.hpp"
#include "cluspt/instance.hpp"

namespace cluspt {

// ---------------------------------------------------------------------------
// Undirected cluster multigraph

/// An original inter-cluster edge seen as an edge between clusters.
/// Normalized so that ci < cj; u lies in ci and v in cj.
struct MultiEdge {
  ClusterId ci;
  ClusterId cj;
  VertexId u;
  VertexId v;
  double w;
};

using MultiEdgeId = std::int32_t;

class ClusterMultiGraph {
 public:
  /// Throws DisconnectedClusterGraph.
  explicit ClusterMultiGraph(const ClusteredInstance& inst);

  std::size_t cluster_count() const noexcept { return k_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const MultiEdge& edge(MultiEdgeId id) const noexcept { return edges_[id]; }
  std::span<const MultiEdge> edges() const noexcept { return edges_; }

  /// Ids of the parallel edges joining clusters a and b (any order).
  std::span<const MultiEdgeId> parallel(ClusterId a, ClusterId b) const;
  /// Ids of edges incident to cluster c.
  std::span<const MultiEdgeId> incident(ClusterId c) const noexcept { return incident_[c]; }

 private:
  std::size_t k_ = 0;
  std::vector<MultiEdge> edges_;  // sorted by (ci, cj, u, v)
  std::vector<MultiEdgeId> ids_;  // 0..m-1, for pair spans
  std::vector<std::pair<std::int64_t, std::pair<std::int32_t, std::int32_t>>> pair_ranges_;
  std::vector<std::vector<MultiEdgeId>> incident_;
};

/// Edge-set chromosome: k-1 multigraph edges forming a spanning tree of G'.
struct InterClusterGenome {
  std::vector<MultiEdgeId> genes;
  bool operator==(const InterClusterGenome&) const = default;
};

bool is_valid_genome(const ClusterMultiGraph& mg, const InterClusterGenome& g);

// ---------------------------------------------------------------------------
// Directed cluster graph for a fixed choice of local roots

/// roots[i] is the chosen local root of cluster i; roots[0] is the instance root.
struct RootCombination {
  std::vector<VertexId> roots;
  bool operator==(const RootCombination&) const = default;
};

bool is_valid_combination(const ClusteredInstance& inst, const RootCombination& u);

/// A possible inter-cluster edge realizing an arc: port vertex in the tail
/// cluster joined to the head cluster's root.
struct EntryEdge {
  VertexId port;
  double w;
};

struct Arc {
  ClusterId tail;
  ClusterId head;
  /// Argmin over candidates of d_tail(root_tail, port) + w; ties to lower port id.
  EntryEdge best;
  /// d_tail(root_tail, best.port) + best.w: the increase of root distance
  /// from the tail's local root to the head's local root.
  double length;
};

using ArcId = std::int32_t;

class LocalTreeCache;

/// H_u: arc (j -> i) exists iff some vertex of cluster j is adjacent to root_i.
class DirectedClusterGraph {
 public:
  /// Throws InfeasibleRoots if some cluster is unreachable from cluster 0.
  DirectedClusterGraph(const ClusteredInstance& inst, const LocalTreeCache& cache,
                       RootCombination roots);

  const RootCombination& roots() const noexcept { return roots_; }
  std::size_t cluster_count() const noexcept { return k_; }
  std::size_t arc_count() const noexcept { return arcs_.size(); }
  const Arc& arc(ArcId id) const noexcept { return arcs_[id]; }
  std::span<const Arc> arcs() const noexcept { return arcs_; }

  /// Arc id of (tail -> head), or -1.
  ArcId find(ClusterId tail, ClusterId head) const noexcept {
    return arc_at_[static_cast<std::size_t>(tail) * k_ + head];
  }
  bool has_arc(ClusterId tail, ClusterId head) const noexcept { return find(tail, head) >= 0; }

  std::span<const ArcId> out_arcs(ClusterId c) const noexcept { return out_[c]; }
  std::span<const ArcId> in_arcs(ClusterId c) const noexcept { return in_[c]; }
  /// All original edges (port, root_head) realizing the arc, ascending port.
  std::span<const EntryEdge> candidates(ArcId id) const noexcept {
    return {candidates_.data() + cand_offset_[id], candidates_.data() + cand_offset_[id + 1]};
  }

  /// True when the graph admits exactly one arborescence.
  bool has_unique_arborescence() const noexcept;

 private:
  std::size_t k_ = 0;
  RootCombination roots_;
  std::vector<Arc> arcs_;
  std::vector<ArcId> arc_at_;
  std::vector<std::vector<ArcId>> out_;
  std::vector<std::vector<ArcId>> in_;
  std::vector<EntryEdge> candidates_;
  std::vector<std::size_t> cand_offset_;
};

/// in_arc parent per cluster: parent[c] is the tail of c's incoming arc,
/// -1 for cluster 0.
struct ClusterArborescence {
  std::vector<ClusterId> parent;
  bool operator==(const ClusterArborescence&) const = default;
};

/// Structural check only: root has no parent, every other cluster reaches 0.
bool is_arborescence(const ClusterArborescence& a);
/// Structure plus every arc present in h.
bool is_valid_arborescence(const DirectedClusterGraph& h, const ClusterArborescence& a);

// ---------------------------------------------------------------------------
// Decoded solutions

struct CluSolution {
  /// Over all vertices; local index == vertex id.
  RootedTree tree;
  /// The k-1 inter-cluster tree edges, stored (parent-side port, child root, w).
  std::vector<Edge> inter_edges;
  double cost = 0.0;
};

/// Shortest-path tree of G[C_i] rooted at a local root, in the cluster's
/// local indexing.
struct LocalSpt {
  std::vector<std::int32_t> parent;
  std::vector<double> parent_weight;
  std::vector<double> dist;
  double total = 0.0;
};

/// Lazily computed local shortest-path trees for every (cluster, root) pair.
/// Thread-safe; entries never change once computed.
class LocalTreeCache {
 public:
  explicit LocalTreeCache(const ClusteredInstance& inst);
  LocalTreeCache(const LocalTreeCache&) = delete;
  LocalTreeCache& operator=(const LocalTreeCache&) = delete;

  const ClusteredInstance& instance() const noexcept { return *inst_; }

  /// SPT of the cluster of `local_root`, rooted there. Throws DisconnectedSubgraph.
  const LocalSpt& get(VertexId local_root) const;

  /// d_c(local_root, v) for v in the same cluster.
  double distance(VertexId local_root, VertexId v) const {
    return get(local_root).dist[inst_->local_index(v)];
  }

 private:
  const ClusteredInstance* inst_;
  std::unique_ptr<std::once_flag[]> once_;
  mutable std::vector<LocalSpt> trees_;
};

/// Decodes genotypes against one instance. Holds the local-tree cache.
class Decoder {
 public:
  explicit Decoder(const ClusteredInstance& inst) : inst_(&inst), cache_(inst) {}

  const ClusteredInstance& instance() const noexcept { return *inst_; }
  const LocalTreeCache& cache() const noexcept { return cache_; }

  /// Objective of the solution a genome decodes to, without building the tree.
  double genome_cost(const ClusterMultiGraph& mg, const InterClusterGenome& g) const;
  CluSolution decode_genome(const ClusterMultiGraph& mg, const InterClusterGenome& g) const;

  double arborescence_cost(const DirectedClusterGraph& h, const ClusterArborescence& a) const;
  CluSolution decode_arborescence(const DirectedClusterGraph& h,
                                  const ClusterArborescence& a) const;

  /// Builds the clustered tree from per-cluster local roots and, for each
  /// non-root cluster, the entry edge (port in the parent cluster, weight).
  CluSolution assemble(std::span<const VertexId> local_roots,
                       std::span<const EntryEdge> entry) const;

 private:
  /// sum_i |C_i| * dist(r, r_i) + S_i(r_i), given root distances.
  double total_cost(std::span<const VertexId> local_roots,
                    std::span<const double> root_dist) const;

  const ClusteredInstance* inst_;
  LocalTreeCache cache_;
};

/// All combinations that differ from u at exactly one position i >= 1,
/// ordered by position, then by ascending replacement vertex.
std::vector<RootCombination> neighbors(const RootCombination& u, const ClusteredInstance& inst);

/// Number of spanning trees of the multigraph (parallel edges distinct),
/// by the matrix-tree theorem. Approximate for large counts.
double count_spanning_trees(const ClusterMultiGraph& mg);

/// Exhaustive minimum over all spanning trees of G'. Throws TooLarge when the
/// tree count exceeds `budget`.
CluSolution brute_force_optimum(const Decoder& decoder, const ClusterMultiGraph& mg,
                                double budget = 200000.0);

/// Every structural property a decoded solution must have: n-1 edges,
/// connected local trees, k-1 inter edges, consistent distances, cost match.
bool is_clustered_spanning_tree(const ClusteredInstance& inst, const CluSolution& s);

}  // namespace cluspt
