#include "cluspt/parallel.hpp"

#include <cassert>

#include "cluspt/decode.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cluspt {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void parallel_for(std::size_t n, Execution exec, const std::function<void(std::size_t)>& body) {
  if (exec == Execution::kSerial || n < 2 || max_threads() < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void evaluate_genomes_serial(const Decoder& decoder, const ClusterMultiGraph& mg,
                             std::span<const InterClusterGenome> genomes, std::span<double> out) {
  assert(out.size() == genomes.size());
  for (std::size_t i = 0; i < genomes.size(); ++i) out[i] = decoder.genome_cost(mg, genomes[i]);
}

void evaluate_genomes_parallel(const Decoder& decoder, const ClusterMultiGraph& mg,
                               std::span<const InterClusterGenome> genomes,
                               std::span<double> out) {
  assert(out.size() == genomes.size());
  const auto count = static_cast<std::int64_t>(genomes.size());
  std::vector<std::exception_ptr> errors(genomes.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      out[i] = decoder.genome_cost(mg, genomes[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace cluspt
