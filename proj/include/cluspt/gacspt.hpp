#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cluspt/decode.hpp"
#include "cluspt/parallel.hpp"
#include "cluspt/rng.hpp"

namespace cluspt {

struct GaConfig {
  std::size_t pop_size = 200;
  std::size_t max_generations = 6000;
  double mutation_rate = 0.1;
  double crossover_rate = 0.9;
  std::uint64_t seed = 0;
  std::size_t elitism = 1;
  /// Stop once the best cost has not improved for this many generations.
  std::size_t convergence_patience = 500;
  Execution execution = Execution::kParallel;

  /// Throws InvalidParameters.
  void validate() const;
};

/// Best cost per generation (generation 0 is the initial population) and the
/// number of decode evaluations spent.
struct EvalTrace {
  std::vector<double> best;
  std::size_t evaluations = 0;
};

struct RunResult {
  CluSolution solution;
  EvalTrace trace;
};

/// Random spanning tree of G': random start cluster, then uniformly random
/// frontier edges, accepted when they reach a new cluster.
InterClusterGenome prim_rst(const ClusterMultiGraph& mg, Rng& rng);

/// PrimRST restricted to the given multigraph edge ids (duplicates ignored).
/// The edge set must connect all clusters.
InterClusterGenome prim_rst_over(const ClusterMultiGraph& mg, std::span<const MultiEdgeId> edges,
                                 Rng& rng);

/// Random spanning tree of the union of both parents' genes.
InterClusterGenome crossover(const InterClusterGenome& p1, const InterClusterGenome& p2,
                             const ClusterMultiGraph& mg, Rng& rng);

/// Swaps one gene that has parallel alternatives for a different parallel
/// edge between the same clusters. No-op when no gene qualifies.
InterClusterGenome mutate(const InterClusterGenome& g, const ClusterMultiGraph& mg, Rng& rng);

RunResult run_gacspt(const Decoder& decoder, const ClusterMultiGraph& mg, const GaConfig& cfg);
RunResult run_gacspt(const ClusteredInstance& inst, const GaConfig& cfg);

}  // namespace cluspt
