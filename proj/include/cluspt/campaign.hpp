#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cluspt/gacspt.hpp"
#include "cluspt/instance.hpp"
#include "cluspt/lsea.hpp"
#include "cluspt/parallel.hpp"

namespace cluspt {

enum class Algorithm { kGacspt, kNlsea, kMlsea };

/// "GACSPT", "N-LSEA", "M-LSEA".
std::string_view algorithm_name(Algorithm a);
/// Accepts display names and CLI ids (gacspt, nlsea, mlsea). Throws InvalidParameters.
Algorithm parse_algorithm(std::string_view s);

struct SolverConfig {
  GaConfig ga;
  LowerConfig lower;
};

struct SolveOutcome {
  CluSolution solution;
  EvalTrace trace;
};

/// Runs one algorithm with the given seed (overrides the configs' seeds).
SolveOutcome solve(const ClusteredInstance& inst, Algorithm algo, const SolverConfig& cfg,
                   std::uint64_t seed);

struct RunRecord {
  std::string instance;
  Algorithm algorithm = Algorithm::kGacspt;
  std::uint64_t seed = 0;
  double best_cost = 0.0;
  double minutes = 0.0;
  std::size_t evaluations = 0;
  std::vector<double> trace;
  /// Set when the run failed; cost fields are then meaningless.
  std::string error;

  bool operator==(const RunRecord&) const = default;
};

/// One JSON object per line; trace is a ';'-joined string.
std::string to_record_line(const RunRecord& r);
RunRecord parse_record_line(std::string_view line);
void write_records(std::ostream& out, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_records(std::istream& in);
std::vector<RunRecord> load_records(const std::filesystem::path& path);

struct SummaryRow {
  std::string instance;
  Algorithm algorithm = Algorithm::kGacspt;
  std::size_t runs = 0;
  double bf = 0.0;
  double avg = 0.0;
  double cv = 0.0;
  double rm = 0.0;
  /// RPD of Avg against the baseline best, when a baseline is known.
  std::optional<double> rpd;

  bool operator==(const SummaryRow&) const = default;
};

struct PiEntry {
  std::string instance;
  Algorithm a;
  Algorithm b;
  double pi = 0.0;  // PI(a, b) on BF
};

struct CampaignSummary {
  std::vector<SummaryRow> rows;  // sorted by (instance, algorithm)
  std::vector<PiEntry> pi;
  /// Instances where M-LSEA's Avg beats N-LSEA's, and the reverse.
  std::size_t nib = 0;
  std::size_t nab = 0;
};

using Baseline = std::map<std::string, double, std::less<>>;

/// "<instance> <best>" per line; '#' starts a comment.
Baseline parse_baseline(std::istream& in);
Baseline load_baseline(const std::filesystem::path& path);

/// Failed runs are excluded. Records need not be sorted.
CampaignSummary summarize(const std::vector<RunRecord>& records,
                          const Baseline* baseline = nullptr);

/// Columns: instance,algo,BF,Avg,CV,Rm (plus RPD when a baseline was used).
std::string format_summary_csv(const CampaignSummary& s);

struct CampaignInstance {
  std::string name;
  const ClusteredInstance* instance = nullptr;
};

struct CampaignOptions {
  std::vector<Algorithm> algorithms;
  std::size_t runs = 30;
  std::uint64_t base_seed = 0;
  SolverConfig config;
  bool record_time = false;
  Execution execution = Execution::kParallel;
};

struct CampaignResult {
  std::vector<RunRecord> records;  // sorted by (instance, algorithm, seed)
  CampaignSummary summary;
};

/// Seeds are base_seed + run index. Cells run concurrently under
/// kParallel, each cell sequentially; a failing cell is recorded and the
/// campaign continues.
CampaignResult run_campaign(const std::vector<CampaignInstance>& instances,
                            const CampaignOptions& options);

/// Per (instance, algorithm): average of normalized traces of non-failed runs.
struct ConvergenceCurve {
  std::string instance;
  Algorithm algorithm;
  std::vector<double> values;
};
std::vector<ConvergenceCurve> convergence_curves(const std::vector<RunRecord>& records);
std::string format_convergence_csv(const std::vector<ConvergenceCurve>& curves);

/// "# cost = <c>" followed by "u v w" per tree edge, 1-based, ascending child.
std::string format_solution(const CluSolution& s);

}  // namespace cluspt
