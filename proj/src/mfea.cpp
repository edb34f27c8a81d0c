#include "cluspt/mfea.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

#include "cluspt/error.hpp"

namespace cluspt {

namespace {

/// Positions where a and b differ; stops counting at 2.
std::pair<int, std::size_t> differing(const RootCombination& a, const RootCombination& b) {
  int count = 0;
  std::size_t where = 0;
  for (std::size_t i = 0; i < a.roots.size() && count < 2; ++i) {
    if (a.roots[i] != b.roots[i]) {
      ++count;
      where = i;
    }
  }
  return {count, where};
}

}  // namespace

std::vector<TaskPair> pair_neighbors(std::span<const RootCombination> nbrs) {
  std::vector<TaskPair> groups;
  std::size_t i = 0;
  while (i < nbrs.size()) {
    if (i + 1 < nbrs.size()) {
      const auto [count, where] = differing(nbrs[i], nbrs[i + 1]);
      if (count == 1) {
        groups.push_back({{i, i + 1}, where});
        i += 2;
        continue;
      }
    }
    groups.push_back({{i}, 0});
    ++i;
  }
  return groups;
}

bool PairTasks::feasible(const ClusterArborescence& a, int t) const {
  const DirectedClusterGraph& h = task(t);
  for (std::size_t c = 1; c < a.parent.size(); ++c)
    if (a.parent[c] < 0 || !h.has_arc(a.parent[c], static_cast<ClusterId>(c))) return false;
  return true;
}

std::vector<Offspring> assortative_mating(const MfIndividual& p1, const MfIndividual& p2,
                                          double rmp, double rand, const PairTasks& tasks,
                                          Rng& rng, std::size_t retries) {
  std::vector<Offspring> out;
  if (p1.skill_factor == p2.skill_factor || rand < rmp) {
    out.push_back({gafll_crossover(p1.arborescence, p2.arborescence, rng), {&p1, &p2}});
  } else {
    out.push_back(
        {gafll_mutate(p1.arborescence, tasks.task(p1.skill_factor), rng, retries), {&p1}});
    out.push_back(
        {gafll_mutate(p2.arborescence, tasks.task(p2.skill_factor), rng, retries), {&p2}});
  }
  return out;
}

std::vector<Offspring> assortative_mating(const MfIndividual& p1, const MfIndividual& p2,
                                          double rmp, const PairTasks& tasks, Rng& rng,
                                          std::size_t retries) {
  const double rand = rng.uniform();
  return assortative_mating(p1, p2, rmp, rand, tasks, rng, retries);
}

int imitate(const Offspring& child, const PairTasks& tasks, Rng& rng) {
  if (child.parents.size() == 1) return child.parents[0]->skill_factor;
  const int s1 = child.parents[0]->skill_factor;
  const int s2 = child.parents[1]->skill_factor;
  const bool f1 = tasks.feasible(child.arborescence, s1);
  const bool f2 = tasks.feasible(child.arborescence, s2);
  if (f1 && f2) return rng.uniform() < 0.5 ? s1 : s2;
  assert(f1 || f2);
  return f1 ? s1 : s2;
}

MfIndividual cultural_transmission(const Offspring& child, const PairTasks& tasks,
                                   const Decoder& decoder, Rng& rng) {
  MfIndividual ind;
  ind.skill_factor = imitate(child, tasks, rng);
  ind.arborescence = child.arborescence;
  ind.factorial_cost[ind.skill_factor] =
      decoder.arborescence_cost(tasks.task(ind.skill_factor), ind.arborescence);
  return ind;
}

PairResult run_mfea_pair(const Decoder& decoder, const PairTasks& tasks, const LowerConfig& cfg,
                         Rng& rng) {
  return run_mfea_pair(decoder, tasks, cfg, rng, MfeaObserver{});
}

PairResult run_mfea_pair(const Decoder& decoder, const PairTasks& tasks, const LowerConfig& cfg,
                         Rng& rng, const MfeaObserver& observer) {
  cfg.validate();
  PairResult result;
  if (tasks.count() == 1) {
    LowerResult lr = run_gafll(decoder, tasks.task(0), cfg, rng);
    result.solutions.push_back(std::move(lr.solution));
    result.traces.push_back(std::move(lr.trace));
    result.evaluations = lr.evaluations;
    return result;
  }

  const std::size_t pop_size = cfg.pop_size;
  std::array<double, 2> best_cost{kInfinity, kInfinity};
  std::array<ClusterArborescence, 2> best;
  result.traces.resize(2);

  auto consider = [&](const MfIndividual& ind) {
    const int t = ind.skill_factor;
    if (ind.factorial_cost[t] < best_cost[t]) {
      best_cost[t] = ind.factorial_cost[t];
      best[t] = ind.arborescence;
    }
  };

  std::vector<MfIndividual> pop;
  pop.reserve(pop_size);
  const std::size_t first_half = (pop_size + 1) / 2;
  for (std::size_t i = 0; i < pop_size; ++i) {
    MfIndividual ind;
    ind.skill_factor = i < first_half ? 0 : 1;
    ind.arborescence = gafll_prim_rst(tasks.task(ind.skill_factor), rng);
    ind.factorial_cost[ind.skill_factor] =
        decoder.arborescence_cost(tasks.task(ind.skill_factor), ind.arborescence);
    consider(ind);
    pop.push_back(std::move(ind));
  }
  result.evaluations = pop_size;
  for (int t = 0; t < 2; ++t) result.traces[t].push_back(best_cost[t]);
  if (observer.on_population) observer.on_population(pop, tasks);

  std::vector<MfIndividual> merged;
  std::vector<std::size_t> order;
  std::vector<double> fitness;
  while (result.evaluations < cfg.eval_budget) {
    merged = pop;
    const std::size_t n = pop.size();
    std::size_t produced = 0;
    while (produced < pop_size && result.evaluations < cfg.eval_budget) {
      const std::size_t a = rng.index(n);
      std::size_t b = rng.index(n - 1);
      if (b >= a) ++b;
      const auto offspring = assortative_mating(pop[a], pop[b], cfg.rmp, tasks, rng,
                                                cfg.mutation_retries);
      for (const Offspring& child : offspring) {
        if (result.evaluations >= cfg.eval_budget) break;
        MfIndividual ind = cultural_transmission(child, tasks, decoder, rng);
        ++result.evaluations;
        ++produced;
        if (observer.on_child) observer.on_child(child, ind.skill_factor);
        consider(ind);
        merged.push_back(std::move(ind));
      }
    }

    // Factorial rank on the skill task; scalar fitness is its reciprocal.
    order.resize(merged.size());
    std::iota(order.begin(), order.end(), 0);
    auto skill_cost = [&](std::size_t i) {
      return merged[i].factorial_cost[merged[i].skill_factor];
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return skill_cost(a) < skill_cost(b); });
    fitness.assign(merged.size(), 0.0);
    std::array<std::size_t, 2> rank{0, 0};
    for (std::size_t i : order) fitness[i] = 1.0 / static_cast<double>(++rank[merged[i].skill_factor]);

    // Ties on fitness go to the lower cost, then to the older individual.
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (fitness[a] != fitness[b]) return fitness[a] > fitness[b];
      if (skill_cost(a) != skill_cost(b)) return skill_cost(a) < skill_cost(b);
      return a < b;
    });
    pop.clear();
    for (std::size_t i = 0; i < pop_size && i < order.size(); ++i)
      pop.push_back(std::move(merged[order[i]]));

    for (int t = 0; t < 2; ++t) result.traces[t].push_back(best_cost[t]);
    if (observer.on_population) observer.on_population(pop, tasks);
  }

  // Identical combinations mean identical tasks; share the better result.
  if (tasks.task(0).roots() == tasks.task(1).roots()) {
    const int t = best_cost[1] < best_cost[0] ? 1 : 0;
    best_cost[1 - t] = best_cost[t];
    best[1 - t] = best[t];
  }
  for (int t = 0; t < 2; ++t)
    result.solutions.push_back(decoder.decode_arborescence(tasks.task(t), best[t]));
  return result;
}

BilevelResult run_mlsea(const Decoder& decoder, const LowerConfig& cfg,
                        const std::optional<RootCombination>& start) {
  const ClusteredInstance& inst = decoder.instance();
  SweepSolver solver = [&](std::span<const RootCombination> nbrs, std::size_t sweep) {
    std::vector<CandidateOutcome> out(nbrs.size());
    const std::vector<TaskPair> groups = pair_neighbors(nbrs);
    parallel_for(groups.size(), cfg.execution, [&](std::size_t g) {
      const TaskPair& group = groups[g];
      std::vector<std::optional<DirectedClusterGraph>> graphs(group.members.size());
      std::vector<std::size_t> feasible;
      for (std::size_t m = 0; m < group.members.size(); ++m) {
        try {
          graphs[m].emplace(inst, decoder.cache(), nbrs[group.members[m]]);
          feasible.push_back(m);
        } catch (const InfeasibleRoots&) {
          out[group.members[m]].feasible = false;
        }
      }
      if (feasible.empty()) return;
      // The stream is keyed on the first solved member so a lone task
      // reproduces the N-LSEA solve exactly.
      const std::size_t lead = group.members[feasible[0]];
      Rng rng(stream_seed(cfg.seed, kSweepStream + sweep, lead));
      PairTasks tasks;
      for (std::size_t i = 0; i < feasible.size(); ++i) tasks.tasks[i] = &*graphs[feasible[i]];
      PairResult pr = run_mfea_pair(decoder, tasks, cfg, rng);
      for (std::size_t i = 0; i < feasible.size(); ++i) {
        CandidateOutcome& o = out[group.members[feasible[i]]];
        o.feasible = true;
        o.solution = std::move(pr.solutions[i]);
        o.evaluations = i == 0 ? pr.evaluations : 0;
      }
    });
    return out;
  };
  return upper_local_search(decoder, cfg, start, solver);
}

BilevelResult run_mlsea(const ClusteredInstance& inst, const LowerConfig& cfg) {
  const Decoder decoder(inst);
  return run_mlsea(decoder, cfg);
}

}  // namespace cluspt
