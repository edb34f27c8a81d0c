#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <span>
#include <vector>

namespace cluspt {

class Decoder;
class ClusterMultiGraph;
struct InterClusterGenome;

/// kSerial is the reference path; kParallel uses OpenMP when available and
/// must produce bit-identical results.
enum class Execution { kSerial, kParallel };

/// Runs body(i) for i in [0, n). Under kParallel iterations are scheduled
/// dynamically across OpenMP threads; an exception thrown by an iteration is
/// rethrown after the loop (the lowest failing index wins).
void parallel_for(std::size_t n, Execution exec, const std::function<void(std::size_t)>& body);

/// Number of threads kParallel may use.
int max_threads();

/// Population fitness kernel: out[i] = decoder.genome_cost(mg, genomes[i]).
void evaluate_genomes_serial(const Decoder& decoder, const ClusterMultiGraph& mg,
                             std::span<const InterClusterGenome> genomes, std::span<double> out);
void evaluate_genomes_parallel(const Decoder& decoder, const ClusterMultiGraph& mg,
                               std::span<const InterClusterGenome> genomes,
                               std::span<double> out);

inline void evaluate_genomes(const Decoder& decoder, const ClusterMultiGraph& mg,
                             std::span<const InterClusterGenome> genomes, std::span<double> out,
                             Execution exec) {
  if (exec == Execution::kParallel)
    evaluate_genomes_parallel(decoder, mg, genomes, out);
  else
    evaluate_genomes_serial(decoder, mg, genomes, out);
}

}  // namespace cluspt
