#include "cluspt/lsea.hpp"

#include <algorithm>
#include <cassert>
#include <tuple>

#include "cluspt/error.hpp"

namespace cluspt {

void LowerConfig::validate() const {
  if (pop_size < 2) throw InvalidParameters("lower-level population must be at least 2");
  if (eval_budget < pop_size)
    throw InvalidParameters("lower-level budget must cover the initial population");
  if (mutation_rate < 0.0 || mutation_rate > 1.0)
    throw InvalidParameters("mutation rate must be in [0, 1]");
  if (crossover_rate < 0.0 || crossover_rate > 1.0)
    throw InvalidParameters("crossover rate must be in [0, 1]");
  if (rmp < 0.0 || rmp > 1.0) throw InvalidParameters("rmp must be in [0, 1]");
}

std::optional<ClusterArborescence> grow_arborescence(std::size_t k, std::span<const ArcKey> arcs,
                                                     Rng& rng) {
  std::vector<std::vector<ClusterId>> out(k);
  for (const ArcKey& a : arcs) out[a.tail].push_back(a.head);
  for (auto& heads : out) {
    std::sort(heads.begin(), heads.end());
    heads.erase(std::unique(heads.begin(), heads.end()), heads.end());
  }

  ClusterArborescence result;
  result.parent.assign(k, -1);
  std::vector<char> covered(k, 0);
  std::vector<ArcKey> frontier;
  auto grow = [&](ClusterId c) {
    covered[c] = 1;
    for (ClusterId h : out[c])
      if (!covered[h]) frontier.push_back({c, h});
  };
  grow(0);
  std::size_t count = 1;
  while (count < k) {
    if (frontier.empty()) return std::nullopt;
    const std::size_t pick = rng.index(frontier.size());
    const ArcKey arc = frontier[pick];
    frontier[pick] = frontier.back();
    frontier.pop_back();
    if (covered[arc.head]) continue;
    result.parent[arc.head] = arc.tail;
    ++count;
    grow(arc.head);
  }
  return result;
}

namespace {

std::vector<ArcKey> graph_arc_keys(const DirectedClusterGraph& h) {
  std::vector<ArcKey> keys;
  keys.reserve(h.arc_count());
  for (const Arc& a : h.arcs()) keys.push_back({a.tail, a.head});
  return keys;
}

}  // namespace

std::vector<ArcKey> arc_keys(const ClusterArborescence& a) {
  std::vector<ArcKey> keys;
  for (std::size_t c = 1; c < a.parent.size(); ++c)
    keys.push_back({a.parent[c], static_cast<ClusterId>(c)});
  return keys;
}

ClusterArborescence gafll_prim_rst(const DirectedClusterGraph& h, Rng& rng) {
  const auto keys = graph_arc_keys(h);
  auto a = grow_arborescence(h.cluster_count(), keys, rng);
  if (!a) throw InfeasibleRoots("directed cluster graph has no arborescence");
  return std::move(*a);
}

ClusterArborescence gafll_crossover(const ClusterArborescence& p1, const ClusterArborescence& p2,
                                    Rng& rng) {
  auto keys = arc_keys(p1);
  const auto more = arc_keys(p2);
  keys.insert(keys.end(), more.begin(), more.end());
  auto a = grow_arborescence(p1.parent.size(), keys, rng);
  assert(a);  // the union contains p1
  return std::move(*a);
}

bool creates_cycle(const ClusterArborescence& a, ClusterId tail, ClusterId head) {
  for (ClusterId x = tail; x >= 0; x = a.parent[x])
    if (x == head) return true;
  return false;
}

ClusterArborescence gafll_mutate(const ClusterArborescence& a, const DirectedClusterGraph& h,
                                 Rng& rng, std::size_t retries) {
  // Arcs into cluster 0 can never be part of an arborescence.
  std::vector<ArcId> candidates;
  for (std::size_t id = 0; id < h.arc_count(); ++id) {
    const Arc& arc = h.arc(static_cast<ArcId>(id));
    if (arc.head != 0 && a.parent[arc.head] != arc.tail)
      candidates.push_back(static_cast<ArcId>(id));
  }
  if (candidates.empty()) return a;
  for (std::size_t attempt = 0; attempt <= retries; ++attempt) {
    const Arc& arc = h.arc(candidates[rng.index(candidates.size())]);
    if (creates_cycle(a, arc.tail, arc.head)) continue;
    ClusterArborescence out = a;
    out.parent[arc.head] = arc.tail;
    return out;
  }
  return a;
}

LowerResult run_gafll(const Decoder& decoder, const DirectedClusterGraph& h,
                      const LowerConfig& cfg, Rng& rng) {
  cfg.validate();
  LowerResult r;
  const std::size_t k = h.cluster_count();

  if (h.has_unique_arborescence()) {
    r.best.parent.assign(k, -1);
    for (std::size_t c = 1; c < k; ++c)
      r.best.parent[c] = h.arc(h.in_arcs(static_cast<ClusterId>(c))[0]).tail;
    r.trace.push_back(decoder.arborescence_cost(h, r.best));
    r.evaluations = 1;
    r.solution = decoder.decode_arborescence(h, r.best);
    return r;
  }

  const std::size_t pop_size = cfg.pop_size;
  std::vector<ClusterArborescence> pop;
  std::vector<double> fitness;
  pop.reserve(pop_size);
  for (std::size_t i = 0; i < pop_size; ++i) {
    pop.push_back(gafll_prim_rst(h, rng));
    fitness.push_back(decoder.arborescence_cost(h, pop.back()));
  }
  r.evaluations = pop_size;

  auto argmin = [](const std::vector<double>& f) {
    return static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
  };
  std::size_t bi = argmin(fitness);
  r.best = pop[bi];
  double best_cost = fitness[bi];
  r.trace.push_back(best_cost);

  std::vector<ClusterArborescence> next;
  std::vector<double> next_fitness;
  while (r.evaluations < cfg.eval_budget) {
    next.clear();
    next_fitness.clear();
    const std::size_t elite = argmin(fitness);
    next.push_back(pop[elite]);
    next_fitness.push_back(fitness[elite]);
    const std::size_t current = pop.size();
    auto tournament = [&]() -> std::size_t {
      const std::size_t a = rng.index(current);
      const std::size_t b = rng.index(current);
      return fitness[b] < fitness[a] ? b : a;
    };
    while (next.size() < pop_size && r.evaluations < cfg.eval_budget) {
      const std::size_t a = tournament();
      const std::size_t b = tournament();
      ClusterArborescence child =
          rng.bernoulli(cfg.crossover_rate) ? gafll_crossover(pop[a], pop[b], rng) : pop[a];
      if (rng.bernoulli(cfg.mutation_rate))
        child = gafll_mutate(child, h, rng, cfg.mutation_retries);
      assert(is_valid_arborescence(h, child));
      next_fitness.push_back(decoder.arborescence_cost(h, child));
      next.push_back(std::move(child));
      ++r.evaluations;
    }
    std::swap(pop, next);
    std::swap(fitness, next_fitness);
    const std::size_t gb = argmin(fitness);
    if (fitness[gb] < best_cost) {
      best_cost = fitness[gb];
      r.best = pop[gb];
    }
    r.trace.push_back(fitness[gb]);
  }
  r.solution = decoder.decode_arborescence(h, r.best);
  return r;
}

RootCombination random_combination(const ClusteredInstance& inst, Rng& rng) {
  RootCombination u;
  u.roots.resize(inst.cluster_count());
  u.roots[0] = inst.root();
  for (std::size_t i = 1; i < inst.cluster_count(); ++i) {
    const auto members = inst.cluster(static_cast<ClusterId>(i));
    u.roots[i] = members[rng.index(members.size())];
  }
  return u;
}

BilevelResult upper_local_search(const Decoder& decoder, const LowerConfig& cfg,
                                 const std::optional<RootCombination>& start,
                                 const SweepSolver& solve_sweep) {
  cfg.validate();
  const ClusteredInstance& inst = decoder.instance();

  // A random start may leave a cluster without entry; redraw a bounded
  // number of times.
  constexpr int kStartAttempts = 1000;
  std::optional<DirectedClusterGraph> h;
  RootCombination current;
  if (start) {
    current = *start;
    h.emplace(inst, decoder.cache(), current);
  } else {
    Rng upper(stream_seed(cfg.seed, kUpperStream));
    for (int attempt = 0; attempt < kStartAttempts && !h; ++attempt) {
      current = random_combination(inst, upper);
      try {
        h.emplace(inst, decoder.cache(), current);
      } catch (const InfeasibleRoots&) {
      }
    }
    if (!h) throw InfeasibleRoots("no feasible root combination found for " + inst.name());
  }

  Rng lower_rng(cfg.seed);
  LowerResult initial = run_gafll(decoder, *h, cfg, lower_rng);

  BilevelResult result;
  result.roots = current;
  result.solution = std::move(initial.solution);
  result.trace.best.push_back(result.solution.cost);
  result.trace.evaluations = initial.evaluations;
  result.lower_solves = 1;

  while (result.trace.evaluations < cfg.max_total_evaluations) {
    const auto nbrs = neighbors(result.roots, inst);
    if (nbrs.empty()) break;
    ++result.sweeps;
    std::vector<CandidateOutcome> outcomes = solve_sweep(nbrs, result.sweeps);
    assert(outcomes.size() == nbrs.size());

    bool improved = false;
    RootCombination adopted;
    for (std::size_t j = 0; j < nbrs.size(); ++j) {
      CandidateOutcome& o = outcomes[j];
      result.trace.evaluations += o.evaluations;
      ++result.lower_solves;
      if (o.feasible && o.solution.cost < result.solution.cost) {
        result.solution = std::move(o.solution);
        adopted = nbrs[j];
        improved = true;
      }
    }
    if (improved) result.roots = std::move(adopted);
    result.trace.best.push_back(result.solution.cost);
    if (!improved) break;
  }
  return result;
}

BilevelResult run_nlsea(const Decoder& decoder, const LowerConfig& cfg,
                        const std::optional<RootCombination>& start) {
  const ClusteredInstance& inst = decoder.instance();
  SweepSolver solver = [&](std::span<const RootCombination> nbrs, std::size_t sweep) {
    std::vector<CandidateOutcome> out(nbrs.size());
    parallel_for(nbrs.size(), cfg.execution, [&](std::size_t j) {
      try {
        const DirectedClusterGraph h(inst, decoder.cache(), nbrs[j]);
        Rng rng(stream_seed(cfg.seed, kSweepStream + sweep, j));
        LowerResult lr = run_gafll(decoder, h, cfg, rng);
        out[j].feasible = true;
        out[j].solution = std::move(lr.solution);
        out[j].evaluations = lr.evaluations;
      } catch (const InfeasibleRoots&) {
        out[j].feasible = false;
      }
    });
    return out;
  };
  return upper_local_search(decoder, cfg, start, solver);
}

BilevelResult run_nlsea(const ClusteredInstance& inst, const LowerConfig& cfg) {
  const Decoder decoder(inst);
  return run_nlsea(decoder, cfg);
}

}  // namespace cluspt
