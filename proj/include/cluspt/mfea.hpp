#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cluspt/decode.hpp"
#include "cluspt/lsea.hpp"
#include "cluspt/rng.hpp"

namespace cluspt {

/// One or two lower-level tasks solved together. For two tasks the root
/// combinations differ at exactly one position q >= 1.
struct TaskPair {
  std::vector<std::size_t> members;  // indices into the neighborhood
  std::size_t differing_position = 0;
};

/// Pairs consecutive neighbors that differ at exactly one position (same
/// cluster block); the rest become singleton groups. Order is preserved.
std::vector<TaskPair> pair_neighbors(std::span<const RootCombination> nbrs);

struct MfIndividual {
  ClusterArborescence arborescence;
  int skill_factor = 0;  // 0 or 1
  std::array<double, 2> factorial_cost{kInfinity, kInfinity};
};

/// An offspring before cultural transmission. Two-parent children come from
/// crossover; single-parent children from mutation of `parents[0]`.
struct Offspring {
  ClusterArborescence arborescence;
  std::vector<const MfIndividual*> parents;
};

/// Task graphs of a pair; tasks[1] is null for a single task.
struct PairTasks {
  std::array<const DirectedClusterGraph*, 2> tasks{nullptr, nullptr};
  std::size_t count() const noexcept { return tasks[1] ? 2 : 1; }
  const DirectedClusterGraph& task(int t) const noexcept { return *tasks[t]; }
  bool feasible(const ClusterArborescence& a, int t) const;
};

/// Assortative mating with an explicit draw `rand` in [0,1): crossover when
/// skill factors match or rand < rmp, otherwise one mutant per parent.
std::vector<Offspring> assortative_mating(const MfIndividual& p1, const MfIndividual& p2,
                                          double rmp, double rand, const PairTasks& tasks,
                                          Rng& rng, std::size_t retries = 10);
/// Same, drawing `rand` from rng.
std::vector<Offspring> assortative_mating(const MfIndividual& p1, const MfIndividual& p2,
                                          double rmp, const PairTasks& tasks, Rng& rng,
                                          std::size_t retries = 10);

/// Skill factor by selective imitation, without evaluation.
int imitate(const Offspring& child, const PairTasks& tasks, Rng& rng);

/// Vertical cultural transmission: picks the skill factor and evaluates the
/// child on that task only; the other factorial cost stays +inf.
MfIndividual cultural_transmission(const Offspring& child, const PairTasks& tasks,
                                   const Decoder& decoder, Rng& rng);

struct PairResult {
  /// Best solution per task (one entry for a singleton group).
  std::vector<CluSolution> solutions;
  std::vector<std::vector<double>> traces;
  std::size_t evaluations = 0;
};

/// Joint MFEA solve of one or two lower tasks under a shared budget. A single
/// task is delegated to run_gafll with the same rng.
PairResult run_mfea_pair(const Decoder& decoder, const PairTasks& tasks, const LowerConfig& cfg,
                         Rng& rng);

/// Observer hooks used by tests to audit every selected population.
struct MfeaObserver {
  std::function<void(std::span<const MfIndividual>, const PairTasks&)> on_population;
  std::function<void(const Offspring&, int skill)> on_child;
};

PairResult run_mfea_pair(const Decoder& decoder, const PairTasks& tasks, const LowerConfig& cfg,
                         Rng& rng, const MfeaObserver& observer);

/// Upper-level local search whose neighborhoods are paired and solved by MFEA.
BilevelResult run_mlsea(const Decoder& decoder, const LowerConfig& cfg,
                        const std::optional<RootCombination>& start = std::nullopt);
BilevelResult run_mlsea(const ClusteredInstance& inst, const LowerConfig& cfg);

}  // namespace cluspt
