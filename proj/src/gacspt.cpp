#include "cluspt/gacspt.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

#include "cluspt/error.hpp"

namespace cluspt {

void GaConfig::validate() const {
  if (pop_size < 2) throw InvalidParameters("population size must be at least 2");
  if (mutation_rate < 0.0 || mutation_rate > 1.0)
    throw InvalidParameters("mutation rate must be in [0, 1]");
  if (crossover_rate < 0.0 || crossover_rate > 1.0)
    throw InvalidParameters("crossover rate must be in [0, 1]");
  if (elitism > pop_size) throw InvalidParameters("elitism exceeds population size");
}

namespace {

/// Random Prim over an incidence structure; incident(c) lists candidate edge
/// ids touching cluster c.
template <class Incident>
InterClusterGenome prim_rst_impl(const ClusterMultiGraph& mg, Incident&& incident, Rng& rng) {
  const std::size_t k = mg.cluster_count();
  InterClusterGenome g;
  if (k <= 1) return g;
  g.genes.reserve(k - 1);
  std::vector<char> in_tree(k, 0);
  std::vector<MultiEdgeId> frontier;

  auto grow = [&](ClusterId c) {
    in_tree[c] = 1;
    for (MultiEdgeId id : incident(c)) {
      const MultiEdge& e = mg.edge(id);
      if (!in_tree[e.ci == c ? e.cj : e.ci]) frontier.push_back(id);
    }
  };

  grow(static_cast<ClusterId>(rng.index(k)));
  std::size_t covered = 1;
  while (covered < k) {
    if (frontier.empty()) throw DisconnectedClusterGraph("edge set does not span all clusters");
    const std::size_t pick = rng.index(frontier.size());
    const MultiEdgeId id = frontier[pick];
    frontier[pick] = frontier.back();
    frontier.pop_back();
    const MultiEdge& e = mg.edge(id);
    const ClusterId fresh = !in_tree[e.ci] ? e.ci : (!in_tree[e.cj] ? e.cj : -1);
    if (fresh < 0) continue;
    g.genes.push_back(id);
    ++covered;
    grow(fresh);
  }
  return g;
}

}  // namespace

InterClusterGenome prim_rst(const ClusterMultiGraph& mg, Rng& rng) {
  return prim_rst_impl(mg, [&](ClusterId c) { return mg.incident(c); }, rng);
}

InterClusterGenome prim_rst_over(const ClusterMultiGraph& mg, std::span<const MultiEdgeId> edges,
                                 Rng& rng) {
  std::vector<MultiEdgeId> ids(edges.begin(), edges.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<std::vector<MultiEdgeId>> incident(mg.cluster_count());
  for (MultiEdgeId id : ids) {
    incident[mg.edge(id).ci].push_back(id);
    incident[mg.edge(id).cj].push_back(id);
  }
  return prim_rst_impl(
      mg, [&](ClusterId c) { return std::span<const MultiEdgeId>(incident[c]); }, rng);
}

InterClusterGenome crossover(const InterClusterGenome& p1, const InterClusterGenome& p2,
                             const ClusterMultiGraph& mg, Rng& rng) {
  std::vector<MultiEdgeId> pool(p1.genes);
  pool.insert(pool.end(), p2.genes.begin(), p2.genes.end());
  return prim_rst_over(mg, pool, rng);
}

InterClusterGenome mutate(const InterClusterGenome& g, const ClusterMultiGraph& mg, Rng& rng) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < g.genes.size(); ++i) {
    const MultiEdge& e = mg.edge(g.genes[i]);
    if (mg.parallel(e.ci, e.cj).size() >= 2) eligible.push_back(i);
  }
  if (eligible.empty()) return g;

  const std::size_t slot = eligible[rng.index(eligible.size())];
  const MultiEdge& e = mg.edge(g.genes[slot]);
  const auto options = mg.parallel(e.ci, e.cj);
  const auto current = static_cast<std::size_t>(
      std::find(options.begin(), options.end(), g.genes[slot]) - options.begin());
  std::size_t pick = rng.index(options.size() - 1);
  if (pick >= current) ++pick;

  InterClusterGenome out = g;
  out.genes[slot] = options[pick];
  return out;
}

RunResult run_gacspt(const Decoder& decoder, const ClusterMultiGraph& mg, const GaConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const std::size_t pop_size = cfg.pop_size;
  const std::size_t k = mg.cluster_count();

  std::vector<InterClusterGenome> pop(pop_size);
  std::vector<double> fitness(pop_size);
  for (auto& g : pop) g = prim_rst(mg, rng);
  evaluate_genomes(decoder, mg, pop, fitness, cfg.execution);

  RunResult result;
  result.trace.evaluations = pop_size;
  auto argmin = [](const std::vector<double>& f) {
    return static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
  };
  std::size_t best_i = argmin(fitness);
  InterClusterGenome best = pop[best_i];
  double best_cost = fitness[best_i];
  result.trace.best.push_back(best_cost);

  // A multigraph that is itself a tree has one genome.
  const bool single_tree = k <= 1 || mg.edge_count() + 1 == k;

  auto tournament = [&]() -> std::size_t {
    const std::size_t a = rng.index(pop_size);
    const std::size_t b = rng.index(pop_size);
    return fitness[b] < fitness[a] ? b : a;
  };

  std::vector<std::size_t> order(pop_size);
  std::vector<InterClusterGenome> next(pop_size);
  std::vector<double> next_fitness(pop_size);
  std::size_t stall = 0;
  for (std::size_t gen = 1; !single_tree && gen <= cfg.max_generations; ++gen) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fitness[a] < fitness[b]; });
    const std::size_t elites = cfg.elitism;
    for (std::size_t i = 0; i < elites; ++i) {
      next[i] = pop[order[i]];
      next_fitness[i] = fitness[order[i]];
    }
    for (std::size_t i = elites; i < pop_size; ++i) {
      const std::size_t a = tournament();
      const std::size_t b = tournament();
      InterClusterGenome child =
          rng.bernoulli(cfg.crossover_rate) ? crossover(pop[a], pop[b], mg, rng) : pop[a];
      if (rng.bernoulli(cfg.mutation_rate)) child = mutate(child, mg, rng);
      assert(is_valid_genome(mg, child));
      next[i] = std::move(child);
    }
    evaluate_genomes(decoder, mg, std::span<const InterClusterGenome>(next).subspan(elites),
                     std::span<double>(next_fitness).subspan(elites), cfg.execution);
    result.trace.evaluations += pop_size - elites;
    std::swap(pop, next);
    std::swap(fitness, next_fitness);

    const std::size_t gen_best = argmin(fitness);
    if (fitness[gen_best] < best_cost) {
      best_cost = fitness[gen_best];
      best = pop[gen_best];
      stall = 0;
    } else {
      ++stall;
    }
    result.trace.best.push_back(fitness[gen_best]);
    if (cfg.convergence_patience > 0 && stall >= cfg.convergence_patience) break;
  }

  result.solution = decoder.decode_genome(mg, best);
  return result;
}

RunResult run_gacspt(const ClusteredInstance& inst, const GaConfig& cfg) {
  const Decoder decoder(inst);
  const ClusterMultiGraph mg(inst);
  return run_gacspt(decoder, mg, cfg);
}

}  // namespace cluspt
