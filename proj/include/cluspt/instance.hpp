#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cluspt/graph.hpp"

namespace cluspt {

using ClusterId = std::int32_t;

/// A weighted graph partitioned into clusters, with a root in cluster 0.
class ClusteredInstance {
 public:
  /// Validates the partition, the root, cluster connectivity and cluster-graph
  /// connectivity. The cluster holding `root` is moved to index 0; vertices of
  /// each cluster are sorted ascending.
  /// Throws ValidationError, or InfeasibleInstance for connectivity failures.
  static ClusteredInstance create(std::string name, WeightedGraph graph,
                                  std::vector<std::vector<VertexId>> clusters, VertexId root);

  const std::string& name() const noexcept { return name_; }
  const WeightedGraph& graph() const noexcept { return graph_; }
  std::size_t vertex_count() const noexcept { return graph_.vertex_count(); }
  std::size_t cluster_count() const noexcept { return clusters_.size(); }
  VertexId root() const noexcept { return root_; }

  std::span<const VertexId> cluster(ClusterId c) const noexcept { return clusters_[c]; }
  const std::vector<std::vector<VertexId>>& clusters() const noexcept { return clusters_; }
  ClusterId cluster_of(VertexId v) const noexcept { return cluster_of_[v]; }
  /// Position of v inside its cluster's sorted vertex list.
  std::int32_t local_index(VertexId v) const noexcept { return local_index_[v]; }

  bool operator==(const ClusteredInstance& other) const;

 private:
  std::string name_;
  WeightedGraph graph_;
  std::vector<std::vector<VertexId>> clusters_;
  std::vector<ClusterId> cluster_of_;
  std::vector<std::int32_t> local_index_;
  VertexId root_ = 0;
};

}  // namespace cluspt
