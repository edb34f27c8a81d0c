#include <algorithm>
#include <set>

#include "cluspt/decode.hpp"
#include "cluspt/error.hpp"
#include "cluspt/gacspt.hpp"
#include "cluspt/instance_io.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cluspt;

namespace {

/// Path of three clusters joined by exactly one edge each.
ClusteredInstance chain_instance() {
  auto g = WeightedGraph::from_edges(6, {{0, 1, 1}, {2, 3, 1}, {4, 5, 1}, {1, 2, 3}, {3, 4, 2}});
  return ClusteredInstance::create("chain", std::move(g), {{0, 1}, {2, 3}, {4, 5}}, 0);
}

std::set<MultiEdgeId> gene_set(const InterClusterGenome& g) {
  return {g.genes.begin(), g.genes.end()};
}

}  // namespace

TEST_SUITE("gacspt") {
  TEST_CASE("prim_rst forced and empty cases") {
    const auto chain = chain_instance();
    const ClusterMultiGraph mg(chain);
    Rng rng(1);
    for (int i = 0; i < 20; ++i) CHECK(gene_set(prim_rst(mg, rng)) == std::set<MultiEdgeId>{0, 1});

    const auto one = generate_instance(6, 1, Layout::kUniformSquare, 3);
    const ClusterMultiGraph mg1(one);
    CHECK(prim_rst(mg1, rng).genes.empty());
  }

  TEST_CASE("prim_rst reaches both toy trees") {
    const auto t1 = testing::toy_t1();
    const ClusterMultiGraph mg(t1);
    int first = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      Rng rng(seed);
      const auto g = prim_rst(mg, rng);
      REQUIRE(g.genes.size() == 1);
      first += g.genes[0] == 0;
    }
    CHECK(first >= 100);
    CHECK(1000 - first >= 100);
  }

  TEST_CASE("prim_rst always yields a valid genome") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto inst = testing::random_explicit(14, 1 + seed % 6, seed);
      const ClusterMultiGraph mg(inst);
      Rng rng(seed);
      for (int i = 0; i < 30; ++i) CHECK(is_valid_genome(mg, prim_rst(mg, rng)));
    }
  }

  TEST_CASE("crossover of identical parents is the parent") {
    const auto inst = testing::random_explicit(12, 4, 8);
    const ClusterMultiGraph mg(inst);
    Rng rng(8);
    const auto p = prim_rst(mg, rng);
    for (int i = 0; i < 20; ++i) CHECK(gene_set(crossover(p, p, mg, rng)) == gene_set(p));
  }

  TEST_CASE("toy crossover returns one of the parents") {
    const auto t1 = testing::toy_t1();
    const ClusterMultiGraph mg(t1);
    const InterClusterGenome a{{0}}, b{{1}};
    Rng rng(2);
    std::set<MultiEdgeId> seen;
    for (int i = 0; i < 200; ++i) {
      const auto c = crossover(a, b, mg, rng);
      REQUIRE(c.genes.size() == 1);
      seen.insert(c.genes[0]);
    }
    CHECK(seen == std::set<MultiEdgeId>{0, 1});
  }

  TEST_CASE("crossover offspring stays inside the parents' union") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto inst = testing::random_explicit(14, 5, seed, 0.3, 0.4);
      const ClusterMultiGraph mg(inst);
      Rng rng(seed);
      for (int i = 0; i < 30; ++i) {
        const auto a = prim_rst(mg, rng);
        const auto b = prim_rst(mg, rng);
        const auto c = crossover(a, b, mg, rng);
        CHECK(is_valid_genome(mg, c));
        auto u = gene_set(a);
        u.merge(gene_set(b));
        for (MultiEdgeId e : c.genes) CHECK(u.count(e) == 1);
      }
    }
  }

  TEST_CASE("toy mutation swaps to the other parallel edge") {
    const auto t1 = testing::toy_t1();
    const ClusterMultiGraph mg(t1);
    Rng rng(3);
    const MultiEdgeId e12 = mg.edge(0).u == 1 ? 0 : 1;
    const auto m = mutate(InterClusterGenome{{e12}}, mg, rng);
    REQUIRE(m.genes.size() == 1);
    CHECK(mg.edge(m.genes[0]).u == 0);
    CHECK(mg.edge(m.genes[0]).v == 3);
    CHECK(mg.edge(m.genes[0]).w == 5.0);
  }

  TEST_CASE("mutation without parallel edges is a no-op") {
    const auto chain = chain_instance();
    const ClusterMultiGraph mg(chain);
    Rng rng(4);
    const auto g = prim_rst(mg, rng);
    CHECK(mutate(g, mg, rng) == g);
  }

  TEST_CASE("mutation changes exactly one gene within its cluster pair") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto inst = testing::random_explicit(14, 4, seed, 0.3, 0.4);
      const ClusterMultiGraph mg(inst);
      Rng rng(seed);
      for (int i = 0; i < 30; ++i) {
        const auto g = prim_rst(mg, rng);
        const auto m = mutate(g, mg, rng);
        CHECK(is_valid_genome(mg, m));
        REQUIRE(m.genes.size() == g.genes.size());
        std::size_t changed = 0;
        for (std::size_t j = 0; j < g.genes.size(); ++j) {
          if (g.genes[j] == m.genes[j]) continue;
          ++changed;
          CHECK(mg.edge(g.genes[j]).ci == mg.edge(m.genes[j]).ci);
          CHECK(mg.edge(g.genes[j]).cj == mg.edge(m.genes[j]).cj);
        }
        bool eligible = false;
        for (MultiEdgeId e : g.genes)
          eligible = eligible || mg.parallel(mg.edge(e).ci, mg.edge(e).cj).size() > 1;
        CHECK(changed == (eligible ? 1u : 0u));
      }
    }
  }

  TEST_CASE("config validation") {
    GaConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.pop_size = 1;
    CHECK_THROWS_AS(cfg.validate(), InvalidParameters);
    cfg = GaConfig{};
    cfg.mutation_rate = 1.5;
    CHECK_THROWS_AS(cfg.validate(), InvalidParameters);
  }

  TEST_CASE("toy run finds the optimum") {
    const auto t1 = testing::toy_t1();
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      GaConfig cfg;
      cfg.pop_size = 10;
      cfg.max_generations = 20;
      cfg.seed = seed;
      CHECK(run_gacspt(t1, cfg).solution.cost == 8.0);
    }
  }

  TEST_CASE("single cluster run returns the shortest-path tree") {
    const auto inst = testing::random_explicit(9, 1, 5);
    GaConfig cfg;
    cfg.pop_size = 4;
    cfg.max_generations = 3;
    const auto r = run_gacspt(inst, cfg);
    const auto spt = dijkstra_spt(inst.graph(), inst.cluster(0), inst.root());
    CHECK(r.solution.cost == tree_cost(spt));
  }

  TEST_CASE("trace is non-increasing and deterministic") {
    const auto inst = generate_instance(60, 6, Layout::kUniformSquare, 12);
    GaConfig cfg;
    cfg.pop_size = 30;
    cfg.max_generations = 40;
    cfg.seed = 99;
    const auto a = run_gacspt(inst, cfg);
    for (std::size_t i = 1; i < a.trace.best.size(); ++i)
      CHECK(a.trace.best[i] <= a.trace.best[i - 1]);
    CHECK(a.trace.best.back() == doctest::Approx(a.solution.cost).epsilon(1e-12));
    CHECK(is_clustered_spanning_tree(inst, a.solution));
    const auto b = run_gacspt(inst, cfg);
    CHECK(a.trace.best == b.trace.best);
    CHECK(a.trace.evaluations == b.trace.evaluations);
    CHECK(a.solution.tree.parent == b.solution.tree.parent);
    cfg.execution = Execution::kSerial;
    const auto c = run_gacspt(inst, cfg);
    CHECK(a.trace.best == c.trace.best);
  }

  TEST_CASE("result is never below the enumerated optimum") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      const auto inst = testing::random_explicit(9, 3, seed);
      const Decoder d(inst);
      const ClusterMultiGraph mg(inst);
      GaConfig cfg;
      cfg.pop_size = 20;
      cfg.max_generations = 30;
      cfg.seed = seed;
      const double opt = brute_force_optimum(d, mg).cost;
      CHECK(run_gacspt(d, mg, cfg).solution.cost >= opt - 1e-9);
    }
  }
}
