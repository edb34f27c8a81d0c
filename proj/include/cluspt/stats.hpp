#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cluspt::stats {

/// Row-major results: rows are datasets, columns are algorithms. Lower is better.
struct ResultMatrix {
  std::size_t datasets = 0;
  std::size_t algorithms = 0;
  std::vector<double> values;
  std::vector<std::string> algorithm_names;

  double at(std::size_t dataset, std::size_t algorithm) const {
    return values[dataset * algorithms + algorithm];
  }
};

/// Mid-ranks (1-based, ties averaged) of values, ascending.
std::vector<double> mid_ranks(std::span<const double> values);

struct OmnibusTest {
  std::vector<double> average_ranks;  // per algorithm
  double statistic = 0.0;
  double p_value = 1.0;
  double df1 = 0.0;
  double df2 = 0.0;  // 0 for chi-squared tests
};

/// Friedman chi-squared on within-dataset ranks.
OmnibusTest friedman_test(const ResultMatrix& m);
/// Iman-Davenport F correction of a Friedman statistic.
OmnibusTest iman_davenport(const OmnibusTest& friedman, std::size_t datasets,
                           std::size_t algorithms);
/// Friedman aligned ranks. Throws DegenerateInput when the denominator vanishes.
OmnibusTest aligned_friedman_test(const ResultMatrix& m);
/// Quade F test. Throws DegenerateInput when every dataset has zero range.
OmnibusTest quade_test(const ResultMatrix& m);

enum class RankFamily { kFriedman, kAligned, kQuade };

struct Comparison {
  std::size_t algorithm = 0;
  double z = 0.0;
  double p_value = 1.0;  // two-sided, unadjusted
  double holm = 1.0;
  double holland = 1.0;
  double hochberg = 1.0;
  double hommel = 1.0;
};

struct PostHoc {
  std::size_t control = 0;
  /// Ordered by ascending unadjusted p.
  std::vector<Comparison> comparisons;
};

/// Control-versus-rest z tests on the family's average ranks, with the
/// control being the lowest average rank.
PostHoc post_hoc(const OmnibusTest& test, RankFamily family, std::size_t datasets);

std::vector<double> holm(std::span<const double> p);
std::vector<double> holland(std::span<const double> p);
std::vector<double> hochberg(std::span<const double> p);
std::vector<double> hommel(std::span<const double> p);

struct WilcoxonResult {
  std::size_t n = 0;  // non-zero differences
  std::size_t ties = 0;
  double r_plus = 0.0;   // ranks where a is better (a < b)
  double r_minus = 0.0;  // ranks where b is better
  double z = 0.0;
  double p_two_sided = 1.0;
  double p_one_sided = 1.0;  // H1: a better than b
};

/// Paired signed-rank test on costs a and b, normal approximation with
/// continuity and tie correction.
WilcoxonResult wilcoxon(std::span<const double> a, std::span<const double> b);

struct PairwiseWilcoxon {
  std::size_t a = 0;
  std::size_t b = 0;
  WilcoxonResult result;
};

struct SuiteReport {
  OmnibusTest friedman;
  OmnibusTest iman_davenport;
  std::optional<OmnibusTest> aligned;
  std::optional<OmnibusTest> quade;
  PostHoc friedman_post_hoc;
  std::optional<PostHoc> aligned_post_hoc;
  std::optional<PostHoc> quade_post_hoc;
  std::vector<PairwiseWilcoxon> wilcoxon;
};

/// Every omnibus, post-hoc and pairwise test. Needs >= 2 algorithms and
/// >= 2 datasets (InvalidParameters otherwise). Tests that are undefined for
/// the input are left empty.
SuiteReport friedman_suite(const ResultMatrix& m);

std::string format_report(const SuiteReport& report, const ResultMatrix& m);

// Distribution tails.
double chi_squared_sf(double x, double df);
double f_sf(double x, double df1, double df2);
double normal_sf(double z);

}  // namespace cluspt::stats
