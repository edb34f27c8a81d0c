#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cluspt/decode.hpp"
#include "cluspt/gacspt.hpp"
#include "cluspt/parallel.hpp"
#include "cluspt/rng.hpp"

namespace cluspt {

/// Lower-level GA settings, shared by N-LSEA and M-LSEA.
struct LowerConfig {
  std::size_t pop_size = 20;
  /// Decode evaluations per lower-level solve (per pair for M-LSEA).
  std::size_t eval_budget = 1200;
  double mutation_rate = 0.1;
  double crossover_rate = 0.9;
  /// Random mating probability (M-LSEA only).
  double rmp = 0.9;
  std::uint64_t seed = 0;
  /// Upper-level stop: total lower-level evaluations.
  std::size_t max_total_evaluations = 1'000'000;
  std::size_t mutation_retries = 10;
  Execution execution = Execution::kParallel;

  void validate() const;
};

/// Arc of a directed cluster graph named by its endpoints, independent of
/// which H graph it came from.
struct ArcKey {
  ClusterId tail;
  ClusterId head;
  bool operator==(const ArcKey&) const = default;
};

/// PrimRST on a directed arc set: grow from cluster 0, pop uniformly random
/// frontier arcs, accept when the head is new. Returns nullopt when some
/// cluster is unreachable.
std::optional<ClusterArborescence> grow_arborescence(std::size_t k, std::span<const ArcKey> arcs,
                                                     Rng& rng);

/// Throws InfeasibleRoots when h has no arborescence.
ClusterArborescence gafll_prim_rst(const DirectedClusterGraph& h, Rng& rng);

/// PrimRST over the union of the parents' arcs.
ClusterArborescence gafll_crossover(const ClusterArborescence& p1, const ClusterArborescence& p2,
                                    Rng& rng);

/// Replaces the in-arc of v_j with a random arc (v_i -> v_j) of h absent from
/// a. Candidates closing a cycle are resampled up to `retries` times; a is
/// returned unchanged when none succeeds.
ClusterArborescence gafll_mutate(const ClusterArborescence& a, const DirectedClusterGraph& h,
                                 Rng& rng, std::size_t retries = 10);

/// True if (tail -> head) is not available because head is an ancestor of tail
/// (or equal to it) in a.
bool creates_cycle(const ClusterArborescence& a, ClusterId tail, ClusterId head);

std::vector<ArcKey> arc_keys(const ClusterArborescence& a);

struct LowerResult {
  CluSolution solution;
  ClusterArborescence best;
  /// Best cost per lower-level generation (generation 0 = initial population).
  std::vector<double> trace;
  std::size_t evaluations = 0;
};

/// GAFLL: generational GA over arborescences of h, binary tournament,
/// elitism 1, stopping after cfg.eval_budget decodes.
LowerResult run_gafll(const Decoder& decoder, const DirectedClusterGraph& h,
                      const LowerConfig& cfg, Rng& rng);

struct BilevelResult {
  CluSolution solution;
  RootCombination roots;
  /// Best cost after the initial solve and after each sweep.
  EvalTrace trace;
  std::size_t sweeps = 0;
  /// Lower-level solves attempted.
  std::size_t lower_solves = 0;
};

/// Stream tags for deriving per-solve RNG streams.
inline constexpr std::uint64_t kUpperStream = 0x75707065ULL;
inline constexpr std::uint64_t kSweepStream = 0x73776565ULL;

/// Uniformly random roots, r_1 fixed to the instance root.
RootCombination random_combination(const ClusteredInstance& inst, Rng& rng);

/// Result of solving one upper-level candidate's lower task.
struct CandidateOutcome {
  bool feasible = false;
  CluSolution solution;
  std::size_t evaluations = 0;
};

/// Solves the lower tasks of a whole neighborhood. `sweep` is 1-based and
/// lets implementations derive per-candidate RNG streams.
using SweepSolver = std::function<std::vector<CandidateOutcome>(
    std::span<const RootCombination> neighborhood, std::size_t sweep)>;

/// Shared upper level of N-LSEA and M-LSEA. The start combination's lower task
/// is solved by run_gafll with Rng(cfg.seed); each sweep then solves the
/// neighborhood and adopts, in neighbor order, every candidate strictly better
/// than the running best. Stops after a sweep without improvement or once
/// cfg.max_total_evaluations is exceeded.
BilevelResult upper_local_search(const Decoder& decoder, const LowerConfig& cfg,
                                 const std::optional<RootCombination>& start,
                                 const SweepSolver& solve_sweep);

/// Upper-level local search with a GAFLL solve per neighbor. `start` defaults
/// to random_combination drawn from the upper stream of cfg.seed.
BilevelResult run_nlsea(const Decoder& decoder, const LowerConfig& cfg,
                        const std::optional<RootCombination>& start = std::nullopt);
BilevelResult run_nlsea(const ClusteredInstance& inst, const LowerConfig& cfg);

}  // namespace cluspt
