#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "cluspt/error.hpp"
#include "cluspt/graph.hpp"

namespace cluspt::detail {

/// Dijkstra on G[members]. local_of(v) maps a graph vertex to its position in
/// members, or a negative value for non-members. Settles vertices in
/// (distance, vertex id) order; relaxation is strict.
template <class LocalOf>
void restricted_spt(const WeightedGraph& g, std::span<const VertexId> members,
                    std::int32_t source, LocalOf&& local_of, std::vector<std::int32_t>& parent,
                    std::vector<double>& parent_weight, std::vector<double>& dist) {
  const std::size_t m = members.size();
  parent.assign(m, -1);
  parent_weight.assign(m, 0.0);
  dist.assign(m, kInfinity);
  dist[source] = 0.0;

  if (g.is_euclidean()) {
    // Complete graph: dense O(m^2) variant.
    std::vector<char> done(m, 0);
    for (std::size_t step = 0; step < m; ++step) {
      std::int32_t best = -1;
      for (std::size_t i = 0; i < m; ++i) {
        if (done[i] || dist[i] == kInfinity) continue;
        if (best < 0 || dist[i] < dist[best] ||
            (dist[i] == dist[best] && members[i] < members[best]))
          best = static_cast<std::int32_t>(i);
      }
      if (best < 0) break;
      done[best] = 1;
      for (std::size_t j = 0; j < m; ++j) {
        if (done[j]) continue;
        const double w = g.euclidean_weight(members[best], members[j]);
        const double nd = dist[best] + w;
        if (nd < dist[j]) {
          dist[j] = nd;
          parent[j] = best;
          parent_weight[j] = w;
        }
      }
    }
  } else {
    using Item = std::tuple<double, VertexId, std::int32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    std::vector<char> done(m, 0);
    heap.emplace(0.0, members[source], source);
    while (!heap.empty()) {
      const auto [d, v, i] = heap.top();
      heap.pop();
      if (done[i] || d > dist[i]) continue;
      done[i] = 1;
      for (const Neighbor& nb : g.adjacency(v)) {
        const std::int32_t j = local_of(nb.vertex);
        if (j < 0 || done[j]) continue;
        const double nd = d + nb.w;
        if (nd < dist[j]) {
          dist[j] = nd;
          parent[j] = i;
          parent_weight[j] = nb.w;
          heap.emplace(nd, nb.vertex, j);
        }
      }
    }
  }

  for (std::size_t i = 0; i < m; ++i)
    if (dist[i] == kInfinity)
      throw DisconnectedSubgraph("vertex " + std::to_string(members[i] + 1) +
                                 " is unreachable from vertex " +
                                 std::to_string(members[source] + 1) + " inside its subgraph");
}

}  // namespace cluspt::detail
