#include <cmath>

#include "cluspt/decode.hpp"
#include "cluspt/error.hpp"
#include "cluspt/instance_io.hpp"
#include "cluspt/mfea.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cluspt;

namespace {

/// Clusters {0} {1,2} {3} {4}. With root 1 in cluster 1 it can be entered
/// from clusters 0, 2 and 3; with root 2 only from cluster 0.
ClusteredInstance asymmetric_instance() {
  auto g = WeightedGraph::from_edges(
      5, {{0, 1, 2}, {0, 2, 3}, {1, 2, 1}, {3, 1, 1}, {0, 4, 1}, {4, 1, 1}});
  return ClusteredInstance::create("asym", std::move(g), {{0}, {1, 2}, {3}, {4}}, 0);
}

MfIndividual individual(ClusterArborescence a, int skill) {
  MfIndividual ind;
  ind.arborescence = std::move(a);
  ind.skill_factor = skill;
  return ind;
}

LowerConfig small_config(std::uint64_t seed) {
  LowerConfig cfg;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_SUITE("mfea") {
  TEST_CASE("pairing neighbors") {
    const std::vector<RootCombination> two{{{0, 1, 5}}, {{0, 2, 5}}};
    const auto g2 = pair_neighbors(two);
    REQUIRE(g2.size() == 1);
    CHECK(g2[0].members == std::vector<std::size_t>{0, 1});
    CHECK(g2[0].differing_position == 1);

    const std::vector<RootCombination> three{{{0, 1, 5}}, {{0, 2, 5}}, {{0, 3, 5}}};
    const auto g3 = pair_neighbors(three);
    REQUIRE(g3.size() == 2);
    CHECK(g3[0].members.size() == 2);
    CHECK(g3[1].members == std::vector<std::size_t>{2});

    // Blocks of different clusters never pair across the boundary.
    const std::vector<RootCombination> mixed{{{0, 2, 5}}, {{0, 1, 6}}, {{0, 1, 7}}};
    const auto gm = pair_neighbors(mixed);
    REQUIRE(gm.size() == 2);
    CHECK(gm[0].members == std::vector<std::size_t>{0});
    CHECK(gm[1].members == std::vector<std::size_t>{1, 2});
    CHECK(gm[1].differing_position == 2);

    const auto t1 = testing::toy_t1();
    const auto nb = neighbors(RootCombination{{0, 2}}, t1);
    const auto gt = pair_neighbors(nb);
    REQUIRE(gt.size() == 1);
    CHECK(gt[0].members.size() == 1);
  }

  TEST_CASE("assortative mating branches on skill and rand") {
    const auto inst = asymmetric_instance();
    const Decoder d(inst);
    const DirectedClusterGraph h1(inst, d.cache(), RootCombination{{0, 1, 3, 4}});
    const DirectedClusterGraph h2(inst, d.cache(), RootCombination{{0, 2, 3, 4}});
    PairTasks tasks;
    tasks.tasks = {&h1, &h2};
    const auto a = individual(ClusterArborescence{{-1, 0, 1, 0}}, 0);
    const auto b = individual(ClusterArborescence{{-1, 0, 1, 0}}, 1);
    const auto a2 = individual(ClusterArborescence{{-1, 3, 1, 0}}, 0);
    Rng rng(1);

    auto same = assortative_mating(a, a2, 0.9, 0.99, tasks, rng);
    REQUIRE(same.size() == 1);
    CHECK(same[0].parents.size() == 2);

    auto low = assortative_mating(a, b, 0.9, 0.1, tasks, rng);
    REQUIRE(low.size() == 1);
    CHECK(low[0].parents.size() == 2);

    auto high = assortative_mating(a, b, 0.9, 0.95, tasks, rng);
    REQUIRE(high.size() == 2);
    CHECK(high[0].parents == std::vector<const MfIndividual*>{&a});
    CHECK(high[1].parents == std::vector<const MfIndividual*>{&b});
    CHECK(tasks.feasible(high[0].arborescence, 0));
    CHECK(tasks.feasible(high[1].arborescence, 1));
  }

  TEST_CASE("cultural transmission") {
    const auto inst = asymmetric_instance();
    const Decoder d(inst);
    const DirectedClusterGraph h1(inst, d.cache(), RootCombination{{0, 1, 3, 4}});
    const DirectedClusterGraph h2(inst, d.cache(), RootCombination{{0, 2, 3, 4}});
    PairTasks tasks;
    tasks.tasks = {&h1, &h2};
    const auto p0 = individual(ClusterArborescence{{-1, 3, 1, 0}}, 0);
    const auto p1 = individual(ClusterArborescence{{-1, 0, 1, 0}}, 1);

    // Cluster 1 entered from cluster 3 exists only for the first task.
    const Offspring only_first{ClusterArborescence{{-1, 3, 1, 0}}, {&p0, &p1}};
    CHECK(tasks.feasible(only_first.arborescence, 0));
    CHECK_FALSE(tasks.feasible(only_first.arborescence, 1));
    Rng rng(2);
    for (int i = 0; i < 20; ++i) {
      const auto c = cultural_transmission(only_first, tasks, d, rng);
      CHECK(c.skill_factor == 0);
      CHECK(std::isinf(c.factorial_cost[1]));
      CHECK(c.factorial_cost[0] == d.arborescence_cost(h1, only_first.arborescence));
    }

    const Offspring mutant{ClusterArborescence{{-1, 0, 1, 0}}, {&p1}};
    for (int i = 0; i < 20; ++i) CHECK(imitate(mutant, tasks, rng) == 1);
  }

  TEST_CASE("imitation is balanced on shared task graphs") {
    const auto inst = testing::random_explicit(10, 4, 6, 0.3, 0.6);
    const Decoder d(inst);
    Rng pick(6);
    std::optional<DirectedClusterGraph> h;
    while (!h) {
      try {
        h.emplace(inst, d.cache(), random_combination(inst, pick));
      } catch (const InfeasibleRoots&) {
      }
    }
    PairTasks tasks;
    tasks.tasks = {&*h, &*h};
    Rng rng(7);
    const auto p0 = individual(gafll_prim_rst(*h, rng), 0);
    const auto p1 = individual(gafll_prim_rst(*h, rng), 1);
    int first = 0;
    for (int i = 0; i < 1000; ++i) {
      const Offspring child{gafll_crossover(p0.arborescence, p1.arborescence, rng), {&p0, &p1}};
      first += imitate(child, tasks, rng) == 0;
    }
    CHECK(first >= 450);
    CHECK(first <= 550);
  }

  TEST_CASE("single task falls back to the plain lower solve") {
    const auto inst = generate_instance(30, 4, Layout::kUniformSquare, 2);
    const Decoder d(inst);
    Rng pick(2);
    std::optional<DirectedClusterGraph> h;
    while (!h) h.emplace(inst, d.cache(), random_combination(inst, pick));
    PairTasks tasks;
    tasks.tasks[0] = &*h;
    const auto cfg = small_config(5);
    Rng r1(42), r2(42);
    const auto a = run_mfea_pair(d, tasks, cfg, r1);
    const auto b = run_gafll(d, *h, cfg, r2);
    REQUIRE(a.solutions.size() == 1);
    CHECK(a.solutions[0].cost == b.solution.cost);
    CHECK(a.evaluations == b.evaluations);
    CHECK(a.traces[0] == b.trace);
  }

  TEST_CASE("paired solve respects budget and individual invariants") {
    const auto inst = generate_instance(40, 5, Layout::kGridCells, 3);
    const Decoder d(inst);
    Rng pick(3);
    std::optional<DirectedClusterGraph> h;
    RootCombination u;
    while (!h) {
      u = random_combination(inst, pick);
      h.emplace(inst, d.cache(), u);
    }
    const auto nb = neighbors(u, inst);
    const auto groups = pair_neighbors(nb);
    std::size_t tested = 0;
    for (const auto& g : groups) {
      if (g.members.size() != 2 || tested == 3) continue;
      ++tested;
      const DirectedClusterGraph t0(inst, d.cache(), nb[g.members[0]]);
      const DirectedClusterGraph t1(inst, d.cache(), nb[g.members[1]]);
      PairTasks tasks;
      tasks.tasks = {&t0, &t1};
      LowerConfig cfg = small_config(tested);
      cfg.eval_budget = 333;
      std::size_t children = 0, violations = 0;
      MfeaObserver obs;
      obs.on_child = [&](const Offspring& c, int skill) {
        ++children;
        if (c.parents.size() == 2 && !tasks.feasible(c.arborescence, 0) &&
            !tasks.feasible(c.arborescence, 1))
          ++violations;
        if (!tasks.feasible(c.arborescence, skill)) ++violations;
      };
      obs.on_population = [&](std::span<const MfIndividual> pop, const PairTasks& t) {
        CHECK(pop.size() == cfg.pop_size);
        for (const auto& ind : pop) {
          const int s = ind.skill_factor;
          if (!std::isfinite(ind.factorial_cost[s]) || !std::isinf(ind.factorial_cost[1 - s]) ||
              !is_valid_arborescence(t.task(s), ind.arborescence))
            ++violations;
        }
      };
      Rng rng(tested);
      const auto r = run_mfea_pair(d, tasks, cfg, rng, obs);
      CHECK(violations == 0);
      CHECK(r.evaluations == cfg.eval_budget);
      CHECK(children + cfg.pop_size == r.evaluations);
      REQUIRE(r.solutions.size() == 2);
      CHECK(is_clustered_spanning_tree(inst, r.solutions[0]));
      CHECK(is_clustered_spanning_tree(inst, r.solutions[1]));
      CHECK(r.solutions[0].tree.vertex.size() == inst.vertex_count());
      CHECK(r.solutions[0].inter_edges.size() == inst.cluster_count() - 1);
    }
    CHECK(tested > 0);
  }

  TEST_CASE("duplicated tasks return equal costs") {
    const auto inst = generate_instance(30, 4, Layout::kUniformSquare, 5);
    const Decoder d(inst);
    Rng pick(5);
    std::optional<DirectedClusterGraph> h;
    while (!h) h.emplace(inst, d.cache(), random_combination(inst, pick));
    PairTasks tasks;
    tasks.tasks = {&*h, &*h};
    Rng rng(9);
    const auto r = run_mfea_pair(d, tasks, small_config(9), rng);
    CHECK(r.solutions[0].cost == r.solutions[1].cost);
  }

  TEST_CASE("paired solves never beat the enumerated task optimum") {
    int compared = 0;
    for (std::uint64_t seed = 0; seed < 60 && compared < 15; ++seed) {
      const auto inst = testing::random_explicit(9, 3, seed, 0.3, 0.4);
      const Decoder d(inst);
      Rng pick(seed);
      const auto u = random_combination(inst, pick);
      const auto nb = neighbors(u, inst);
      for (const auto& g : pair_neighbors(nb)) {
        if (g.members.size() != 2) continue;
        std::array<std::optional<DirectedClusterGraph>, 2> hs;
        try {
          hs[0].emplace(inst, d.cache(), nb[g.members[0]]);
          hs[1].emplace(inst, d.cache(), nb[g.members[1]]);
        } catch (const InfeasibleRoots&) {
          continue;
        }
        PairTasks tasks;
        tasks.tasks = {&*hs[0], &*hs[1]};
        Rng rng(seed);
        const auto r = run_mfea_pair(d, tasks, small_config(seed), rng);
        for (int t = 0; t < 2; ++t) {
          double best = kInfinity;
          const auto& roots = nb[g.members[t]].roots;
          testing::for_each_arborescence(
              inst.cluster_count(), [&](ClusterId a, ClusterId b) { return hs[t]->has_arc(a, b); },
              [&](const std::vector<std::int32_t>& parent) {
                best = std::min(best, testing::independent_arborescence_cost(inst, roots, parent));
              });
          CHECK(r.solutions[t].cost >= best - 1e-9);
          CHECK(r.solutions[t].cost <= best * (1 + 1e-9));
        }
        ++compared;
        break;
      }
    }
    CHECK(compared >= 5);
  }

  TEST_CASE("M-LSEA on the toy") {
    const auto t1 = testing::toy_t1();
    for (std::uint64_t seed = 0; seed < 5; ++seed)
      CHECK(run_mlsea(t1, small_config(seed)).solution.cost == 8.0);
    const Decoder d(t1);
    CHECK(run_mlsea(d, small_config(0), RootCombination{{0, 3}}).solution.cost == 8.0);
  }

  TEST_CASE("singleton clusters make M-LSEA and N-LSEA agree") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto inst = generate_instance(8, 8, Layout::kUniformSquare, seed);
      const auto cfg = small_config(seed);
      CHECK(run_mlsea(inst, cfg).solution.cost == run_nlsea(inst, cfg).solution.cost);
    }
  }

  TEST_CASE("M-LSEA is deterministic and independent of threading") {
    const auto inst = generate_instance(40, 5, Layout::kUniformSquare, 11);
    LowerConfig cfg = small_config(4);
    cfg.eval_budget = 200;
    const auto a = run_mlsea(inst, cfg);
    const auto b = run_mlsea(inst, cfg);
    cfg.execution = Execution::kSerial;
    const auto c = run_mlsea(inst, cfg);
    CHECK(a.trace.best == b.trace.best);
    CHECK(a.trace.best == c.trace.best);
    CHECK(a.roots == c.roots);
    CHECK(a.trace.evaluations == c.trace.evaluations);
    for (std::size_t i = 1; i + 1 < a.trace.best.size(); ++i)
      CHECK(a.trace.best[i] < a.trace.best[i - 1]);
    CHECK(is_clustered_spanning_tree(inst, a.solution));
  }
}
