#include "cluspt/decode.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "cluspt/error.hpp"
#include "spt_kernel.hpp"

namespace cluspt {

namespace {

std::int64_t pair_key(ClusterId a, ClusterId b, std::size_t k) {
  if (a > b) std::swap(a, b);
  return static_cast<std::int64_t>(a) * static_cast<std::int64_t>(k) + b;
}

/// Union-find with undo, for enumeration and validity checks.
class RollbackSets {
 public:
  explicit RollbackSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t find(std::size_t x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    history_.push_back(b);
    return true;
  }
  void undo() {
    const std::size_t b = history_.back();
    history_.pop_back();
    size_[parent_[b]] -= size_[b];
    parent_[b] = b;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::vector<std::size_t> history_;
};

/// Top-down cluster order of a parent array rooted at cluster 0.
std::vector<ClusterId> top_down_order(std::span<const ClusterId> parent) {
  const std::size_t k = parent.size();
  std::vector<std::size_t> offset(k + 1, 0);
  for (std::size_t c = 1; c < k; ++c) ++offset[parent[c] + 1];
  for (std::size_t c = 0; c < k; ++c) offset[c + 1] += offset[c];
  std::vector<ClusterId> children(offset[k]);
  std::vector<std::size_t> fill(offset.begin(), offset.end() - 1);
  for (std::size_t c = 1; c < k; ++c) children[fill[parent[c]]++] = static_cast<ClusterId>(c);

  std::vector<ClusterId> order;
  order.reserve(k);
  order.push_back(0);
  for (std::size_t head = 0; head < order.size(); ++head) {
    const ClusterId c = order[head];
    for (std::size_t i = offset[c]; i < offset[c + 1]; ++i) order.push_back(children[i]);
  }
  return order;
}

}  // namespace

// ---------------------------------------------------------------------------
// ClusterMultiGraph

ClusterMultiGraph::ClusterMultiGraph(const ClusteredInstance& inst) : k_(inst.cluster_count()) {
  const WeightedGraph& g = inst.graph();
  auto add = [&](VertexId a, VertexId b, double w) {
    ClusterId ca = inst.cluster_of(a), cb = inst.cluster_of(b);
    if (ca == cb) return;
    if (ca > cb) {
      std::swap(ca, cb);
      std::swap(a, b);
    }
    edges_.push_back({ca, cb, a, b, w});
  };
  if (g.is_euclidean()) {
    const auto n = static_cast<VertexId>(g.vertex_count());
    for (VertexId a = 0; a < n; ++a)
      for (VertexId b = a + 1; b < n; ++b)
        if (inst.cluster_of(a) != inst.cluster_of(b)) add(a, b, g.euclidean_weight(a, b));
  } else {
    for (const Edge& e : g.edges()) add(e.u, e.v, e.w);
  }
  std::sort(edges_.begin(), edges_.end(), [](const MultiEdge& x, const MultiEdge& y) {
    return std::tie(x.ci, x.cj, x.u, x.v) < std::tie(y.ci, y.cj, y.u, y.v);
  });

  ids_.resize(edges_.size());
  std::iota(ids_.begin(), ids_.end(), 0);
  incident_.assign(k_, {});
  RollbackSets sets(k_);
  std::size_t components = k_;
  for (std::size_t i = 0; i < edges_.size();) {
    std::size_t j = i;
    while (j < edges_.size() && edges_[j].ci == edges_[i].ci && edges_[j].cj == edges_[i].cj) ++j;
    pair_ranges_.push_back({pair_key(edges_[i].ci, edges_[i].cj, k_),
                            {static_cast<std::int32_t>(i), static_cast<std::int32_t>(j)}});
    if (sets.unite(edges_[i].ci, edges_[i].cj)) --components;
    i = j;
  }
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    incident_[edges_[i].ci].push_back(static_cast<MultiEdgeId>(i));
    incident_[edges_[i].cj].push_back(static_cast<MultiEdgeId>(i));
  }
  if (components > 1)
    throw DisconnectedClusterGraph("the cluster multigraph has " + std::to_string(components) +
                                   " components");
}

std::span<const MultiEdgeId> ClusterMultiGraph::parallel(ClusterId a, ClusterId b) const {
  const std::int64_t key = pair_key(a, b, k_);
  const auto it = std::lower_bound(pair_ranges_.begin(), pair_ranges_.end(), key,
                                   [](const auto& r, std::int64_t x) { return r.first < x; });
  if (it == pair_ranges_.end() || it->first != key) return {};
  return {ids_.data() + it->second.first, ids_.data() + it->second.second};
}

bool is_valid_genome(const ClusterMultiGraph& mg, const InterClusterGenome& g) {
  const std::size_t k = mg.cluster_count();
  if (g.genes.size() + 1 != k) return false;
  RollbackSets sets(k);
  for (MultiEdgeId id : g.genes) {
    if (id < 0 || static_cast<std::size_t>(id) >= mg.edge_count()) return false;
    if (!sets.unite(mg.edge(id).ci, mg.edge(id).cj)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Local trees

LocalTreeCache::LocalTreeCache(const ClusteredInstance& inst)
    : inst_(&inst),
      once_(std::make_unique<std::once_flag[]>(inst.vertex_count())),
      trees_(inst.vertex_count()) {}

const LocalSpt& LocalTreeCache::get(VertexId local_root) const {
  std::call_once(once_[local_root], [&] {
    const ClusteredInstance& inst = *inst_;
    const ClusterId c = inst.cluster_of(local_root);
    LocalSpt& t = trees_[local_root];
    detail::restricted_spt(
        inst.graph(), inst.cluster(c), inst.local_index(local_root),
        [&](VertexId v) { return inst.cluster_of(v) == c ? inst.local_index(v) : -1; }, t.parent,
        t.parent_weight, t.dist);
    t.total = std::accumulate(t.dist.begin(), t.dist.end(), 0.0);
  });
  return trees_[local_root];
}

// ---------------------------------------------------------------------------
// Directed cluster graph

bool is_valid_combination(const ClusteredInstance& inst, const RootCombination& u) {
  if (u.roots.size() != inst.cluster_count()) return false;
  if (u.roots.empty() || u.roots[0] != inst.root()) return false;
  for (std::size_t i = 0; i < u.roots.size(); ++i) {
    const VertexId r = u.roots[i];
    if (r < 0 || static_cast<std::size_t>(r) >= inst.vertex_count()) return false;
    if (inst.cluster_of(r) != static_cast<ClusterId>(i)) return false;
  }
  return true;
}

DirectedClusterGraph::DirectedClusterGraph(const ClusteredInstance& inst,
                                           const LocalTreeCache& cache, RootCombination roots)
    : k_(inst.cluster_count()), roots_(std::move(roots)) {
  if (!is_valid_combination(inst, roots_))
    throw InvalidParameters("invalid root combination for instance " + inst.name());

  arc_at_.assign(k_ * k_, -1);
  out_.assign(k_, {});
  in_.assign(k_, {});
  cand_offset_.push_back(0);

  std::vector<std::vector<EntryEdge>> by_tail(k_);
  for (std::size_t head = 0; head < k_; ++head) {
    const VertexId r = roots_.roots[head];
    for (auto& list : by_tail) list.clear();
    inst.graph().for_each_neighbor(r, [&](VertexId u, double w) {
      const ClusterId tail = inst.cluster_of(u);
      if (tail != static_cast<ClusterId>(head)) by_tail[tail].push_back({u, w});
    });
    for (std::size_t tail = 0; tail < k_; ++tail) {
      auto& list = by_tail[tail];
      if (list.empty()) continue;
      std::sort(list.begin(), list.end(),
                [](const EntryEdge& a, const EntryEdge& b) { return a.port < b.port; });
      const VertexId tail_root = roots_.roots[tail];
      Arc arc{static_cast<ClusterId>(tail), static_cast<ClusterId>(head), list.front(), kInfinity};
      for (const EntryEdge& e : list) {
        const double len = cache.distance(tail_root, e.port) + e.w;
        if (len < arc.length) {
          arc.length = len;
          arc.best = e;
        }
      }
      const auto id = static_cast<ArcId>(arcs_.size());
      arcs_.push_back(arc);
      arc_at_[tail * k_ + head] = id;
      out_[tail].push_back(id);
      in_[head].push_back(id);
      candidates_.insert(candidates_.end(), list.begin(), list.end());
      cand_offset_.push_back(candidates_.size());
    }
  }

  std::vector<char> seen(k_, 0);
  std::vector<ClusterId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const ClusterId c = stack.back();
    stack.pop_back();
    for (ArcId id : out_[c]) {
      const ClusterId h = arcs_[id].head;
      if (!seen[h]) {
        seen[h] = 1;
        ++reached;
        stack.push_back(h);
      }
    }
  }
  if (reached != k_) {
    std::size_t first = 0;
    while (seen[first]) ++first;
    throw InfeasibleRoots("cluster " + std::to_string(first + 1) +
                          " cannot be entered through root " +
                          std::to_string(roots_.roots[first] + 1));
  }
}

bool DirectedClusterGraph::has_unique_arborescence() const noexcept {
  for (std::size_t c = 1; c < k_; ++c)
    if (in_[c].size() != 1) return false;
  return true;
}

bool is_arborescence(const ClusterArborescence& a) {
  const std::size_t k = a.parent.size();
  if (k == 0 || a.parent[0] != -1) return false;
  for (std::size_t c = 1; c < k; ++c)
    if (a.parent[c] < 0 || static_cast<std::size_t>(a.parent[c]) >= k ||
        a.parent[c] == static_cast<ClusterId>(c))
      return false;
  // Every cluster must reach 0 within k steps.
  std::vector<char> state(k, 0);  // 0 unknown, 1 on path, 2 reaches root
  state[0] = 2;
  std::vector<ClusterId> path;
  for (std::size_t c = 1; c < k; ++c) {
    ClusterId x = static_cast<ClusterId>(c);
    path.clear();
    while (state[x] == 0) {
      state[x] = 1;
      path.push_back(x);
      x = a.parent[x];
    }
    if (state[x] == 1) return false;
    for (ClusterId p : path) state[p] = 2;
  }
  return true;
}

bool is_valid_arborescence(const DirectedClusterGraph& h, const ClusterArborescence& a) {
  if (a.parent.size() != h.cluster_count() || !is_arborescence(a)) return false;
  for (std::size_t c = 1; c < a.parent.size(); ++c)
    if (!h.has_arc(a.parent[c], static_cast<ClusterId>(c))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Decoder

double Decoder::total_cost(std::span<const VertexId> local_roots,
                           std::span<const double> root_dist) const {
  double cost = 0.0;
  for (std::size_t c = 0; c < local_roots.size(); ++c)
    cost += static_cast<double>(inst_->cluster(static_cast<ClusterId>(c)).size()) * root_dist[c] +
            cache_.get(local_roots[c]).total;
  return cost;
}

namespace {

struct OrientedGenome {
  std::vector<VertexId> local_roots;
  std::vector<ClusterId> parent;
  std::vector<EntryEdge> entry;
  std::vector<double> root_dist;
};

OrientedGenome orient_genome(const ClusteredInstance& inst, const LocalTreeCache& cache,
                             const ClusterMultiGraph& mg, const InterClusterGenome& g) {
  const std::size_t k = mg.cluster_count();
  assert(is_valid_genome(mg, g));
  std::vector<std::size_t> offset(k + 1, 0);
  for (MultiEdgeId id : g.genes) {
    ++offset[mg.edge(id).ci + 1];
    ++offset[mg.edge(id).cj + 1];
  }
  for (std::size_t c = 0; c < k; ++c) offset[c + 1] += offset[c];
  std::vector<MultiEdgeId> incident(offset[k]);
  std::vector<std::size_t> fill(offset.begin(), offset.end() - 1);
  for (MultiEdgeId id : g.genes) {
    incident[fill[mg.edge(id).ci]++] = id;
    incident[fill[mg.edge(id).cj]++] = id;
  }

  OrientedGenome o;
  o.local_roots.assign(k, kNoVertex);
  o.parent.assign(k, -1);
  o.entry.assign(k, {kNoVertex, 0.0});
  o.root_dist.assign(k, 0.0);
  o.local_roots[0] = inst.root();
  std::vector<ClusterId> stack{0};
  std::vector<char> seen(k, 0);
  seen[0] = 1;
  while (!stack.empty()) {
    const ClusterId c = stack.back();
    stack.pop_back();
    for (std::size_t i = offset[c]; i < offset[c + 1]; ++i) {
      const MultiEdge& e = mg.edge(incident[i]);
      const bool forward = e.ci == c;
      const ClusterId child = forward ? e.cj : e.ci;
      if (seen[child]) continue;
      seen[child] = 1;
      const VertexId port = forward ? e.u : e.v;
      const VertexId entry = forward ? e.v : e.u;
      o.parent[child] = c;
      o.local_roots[child] = entry;
      o.entry[child] = {port, e.w};
      o.root_dist[child] = o.root_dist[c] + cache.distance(o.local_roots[c], port) + e.w;
      stack.push_back(child);
    }
  }
  return o;
}

}  // namespace

double Decoder::genome_cost(const ClusterMultiGraph& mg, const InterClusterGenome& g) const {
  const OrientedGenome o = orient_genome(*inst_, cache_, mg, g);
  return total_cost(o.local_roots, o.root_dist);
}

CluSolution Decoder::decode_genome(const ClusterMultiGraph& mg,
                                   const InterClusterGenome& g) const {
  const OrientedGenome o = orient_genome(*inst_, cache_, mg, g);
  return assemble(o.local_roots, o.entry);
}

double Decoder::arborescence_cost(const DirectedClusterGraph& h,
                                  const ClusterArborescence& a) const {
  assert(is_valid_arborescence(h, a));
  const std::size_t k = h.cluster_count();
  std::vector<double> root_dist(k, 0.0);
  for (ClusterId c : top_down_order(a.parent))
    if (c != 0) root_dist[c] = root_dist[a.parent[c]] + h.arc(h.find(a.parent[c], c)).length;
  return total_cost(h.roots().roots, root_dist);
}

CluSolution Decoder::decode_arborescence(const DirectedClusterGraph& h,
                                         const ClusterArborescence& a) const {
  assert(is_valid_arborescence(h, a));
  const std::size_t k = h.cluster_count();
  std::vector<EntryEdge> entry(k, {kNoVertex, 0.0});
  for (std::size_t c = 1; c < k; ++c)
    entry[c] = h.arc(h.find(a.parent[c], static_cast<ClusterId>(c))).best;
  return assemble(h.roots().roots, entry);
}

CluSolution Decoder::assemble(std::span<const VertexId> local_roots,
                              std::span<const EntryEdge> entry) const {
  const ClusteredInstance& inst = *inst_;
  const std::size_t n = inst.vertex_count();
  const std::size_t k = inst.cluster_count();

  CluSolution s;
  RootedTree& t = s.tree;
  t.vertex.resize(n);
  std::iota(t.vertex.begin(), t.vertex.end(), 0);
  t.parent.assign(n, RootedTree::kNoParent);
  t.parent_weight.assign(n, 0.0);
  t.dist.assign(n, 0.0);
  t.root = inst.root();

  for (std::size_t c = 0; c < k; ++c) {
    const auto members = inst.cluster(static_cast<ClusterId>(c));
    const LocalSpt& spt = cache_.get(local_roots[c]);
    for (std::size_t i = 0; i < members.size(); ++i) {
      const VertexId v = members[i];
      if (spt.parent[i] >= 0) {
        t.parent[v] = members[spt.parent[i]];
        t.parent_weight[v] = spt.parent_weight[i];
      } else if (c != 0) {
        t.parent[v] = entry[c].port;
        t.parent_weight[v] = entry[c].w;
        s.inter_edges.push_back({entry[c].port, v, entry[c].w});
      }
    }
  }

  // Distances top-down so that dist[v] == dist[parent] + w holds exactly.
  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v)
    if (t.parent[v] >= 0) ++offset[t.parent[v] + 1];
  for (std::size_t v = 0; v < n; ++v) offset[v + 1] += offset[v];
  std::vector<VertexId> children(offset[n]);
  std::vector<std::size_t> fill(offset.begin(), offset.end() - 1);
  for (std::size_t v = 0; v < n; ++v)
    if (t.parent[v] >= 0) children[fill[t.parent[v]]++] = static_cast<VertexId>(v);
  std::vector<VertexId> queue{inst.root()};
  queue.reserve(n);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const VertexId v = queue[head];
    for (std::size_t i = offset[v]; i < offset[v + 1]; ++i) {
      const VertexId c = children[i];
      t.dist[c] = t.dist[v] + t.parent_weight[c];
      queue.push_back(c);
    }
  }
  assert(queue.size() == n);
  s.cost = tree_cost(t);
  return s;
}

// ---------------------------------------------------------------------------
// Neighborhood and exhaustive search

std::vector<RootCombination> neighbors(const RootCombination& u, const ClusteredInstance& inst) {
  std::vector<RootCombination> out;
  for (std::size_t i = 1; i < u.roots.size(); ++i)
    for (VertexId v : inst.cluster(static_cast<ClusterId>(i))) {
      if (v == u.roots[i]) continue;
      out.push_back(u);
      out.back().roots[i] = v;
    }
  return out;
}

double count_spanning_trees(const ClusterMultiGraph& mg) {
  const std::size_t k = mg.cluster_count();
  if (k <= 1) return 1.0;
  const std::size_t m = k - 1;
  std::vector<long double> lap(m * m, 0.0L);
  for (const MultiEdge& e : mg.edges()) {
    const std::size_t a = static_cast<std::size_t>(e.ci), b = static_cast<std::size_t>(e.cj);
    if (a > 0) lap[(a - 1) * m + (a - 1)] += 1.0L;
    if (b > 0) lap[(b - 1) * m + (b - 1)] += 1.0L;
    if (a > 0 && b > 0) {
      lap[(a - 1) * m + (b - 1)] -= 1.0L;
      lap[(b - 1) * m + (a - 1)] -= 1.0L;
    }
  }
  long double det = 1.0L;
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::fabs(lap[r * m + col]) > std::fabs(lap[pivot * m + col])) pivot = r;
    if (lap[pivot * m + col] == 0.0L) return 0.0;
    if (pivot != col) {
      for (std::size_t j = 0; j < m; ++j) std::swap(lap[col * m + j], lap[pivot * m + j]);
      det = -det;
    }
    const long double p = lap[col * m + col];
    det *= p;
    for (std::size_t r = col + 1; r < m; ++r) {
      const long double f = lap[r * m + col] / p;
      if (f == 0.0L) continue;
      for (std::size_t j = col; j < m; ++j) lap[r * m + j] -= f * lap[col * m + j];
    }
  }
  return static_cast<double>(std::round(det));
}

CluSolution brute_force_optimum(const Decoder& decoder, const ClusterMultiGraph& mg,
                                double budget) {
  const double trees = count_spanning_trees(mg);
  if (trees > budget)
    throw TooLarge("multigraph has " + std::to_string(trees) + " spanning trees (budget " +
                   std::to_string(budget) + ")");
  const std::size_t k = mg.cluster_count();
  const std::size_t m = mg.edge_count();
  RollbackSets sets(k);
  InterClusterGenome current, best;
  double best_cost = kInfinity;

  // Include/exclude each edge in order; only acyclic partial sets are kept,
  // so every complete leaf is a spanning tree.
  auto recurse = [&](auto&& self, std::size_t next) -> void {
    if (current.genes.size() + 1 == k) {
      const double c = decoder.genome_cost(mg, current);
      if (c < best_cost) {
        best_cost = c;
        best = current;
      }
      return;
    }
    if (m - next < k - 1 - current.genes.size()) return;
    const MultiEdge& e = mg.edge(static_cast<MultiEdgeId>(next));
    if (sets.unite(e.ci, e.cj)) {
      current.genes.push_back(static_cast<MultiEdgeId>(next));
      self(self, next + 1);
      current.genes.pop_back();
      sets.undo();
    }
    self(self, next + 1);
  };
  recurse(recurse, 0);
  return decoder.decode_genome(mg, best);
}

bool is_clustered_spanning_tree(const ClusteredInstance& inst, const CluSolution& s) {
  const std::size_t n = inst.vertex_count();
  const std::size_t k = inst.cluster_count();
  const RootedTree& t = s.tree;
  if (t.size() != n || t.root != inst.root()) return false;
  for (std::size_t v = 0; v < n; ++v)
    if (t.vertex[v] != static_cast<VertexId>(v)) return false;
  if (!is_consistent(t)) return false;

  const WeightedGraph& g = inst.graph();
  std::vector<std::size_t> intra(k, 0);
  std::size_t inter = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const VertexId p = t.parent[v];
    if (p < 0) continue;
    if (g.weight(p, static_cast<VertexId>(v)) != t.parent_weight[v]) return false;
    if (inst.cluster_of(p) == inst.cluster_of(static_cast<VertexId>(v)))
      ++intra[inst.cluster_of(p)];
    else
      ++inter;
  }
  for (std::size_t c = 0; c < k; ++c)
    if (intra[c] + 1 != inst.cluster(static_cast<ClusterId>(c)).size()) return false;
  if (inter + 1 != k || s.inter_edges.size() + 1 != k) return false;
  return s.cost == tree_cost(t);
}

}  // namespace cluspt
