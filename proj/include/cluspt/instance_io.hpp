#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>

#include "cluspt/instance.hpp"

namespace cluspt {

// Instance file format (UTF-8, LF line endings, ids 1-based on disk):
//
//   NAME : <identifier>
//   TYPE : CluSPT
//   DIMENSION : <n>
//   EDGE_WEIGHT_TYPE : EUC_2D_REAL | EXPLICIT
//   NUMBER_OF_CLUSTERS : <k>
//   ROOT : <vertex>
//   NODE_COORD_SECTION          (EUC_2D_REAL)   "<id> <x> <y>" per vertex
//   EDGE_SECTION                (EXPLICIT)      "<u> <v> <w>" per edge
//   CLUSTER_SECTION                             "<v> <v> ... -1" per cluster
//   EOF
//
// Sections end at the next keyword or at end of input. Header keys accept
// "KEY : value" and "KEY: value".

ClusteredInstance parse_instance(std::istream& in);
ClusteredInstance parse_instance(std::string_view text);
ClusteredInstance load_instance(const std::filesystem::path& path);

/// Canonical text: header in fixed order, edges with u < v sorted
/// lexicographically, clusters in index order with ascending vertices,
/// reals in shortest round-trip form.
std::string serialize_instance(const ClusteredInstance& inst);
void save_instance(const ClusteredInstance& inst, const std::filesystem::path& path);

enum class Layout { kUniformSquare, kGridCells };

/// Complete Euclidean instance on [0,1000)^2. Uniform-square clusters points
/// by nearest of k random centers; grid-cells splits the square into an a x b
/// grid (a*b = k, a the largest divisor <= sqrt k) and seeds one point per cell.
/// Throws InvalidParameters if k > n or k == 0.
ClusteredInstance generate_instance(std::size_t n, std::size_t k, Layout layout,
                                    std::uint64_t seed);

/// Shortest decimal text that parses back to exactly `x`.
std::string format_real(double x);

}  // namespace cluspt
