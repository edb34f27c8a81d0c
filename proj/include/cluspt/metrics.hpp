#pragma once

#include <span>
#include <vector>

namespace cluspt {

/// Relative percentage difference of a solution to a baseline, in percent.
/// Throws InvalidBaseline if best <= 0.
double rpd(double solution, double best);

/// Percentage improvement of cost_a over cost_b, in percent; positive when
/// a is cheaper. Throws InvalidBaseline if cost_b <= 0.
double pi_gap(double cost_a, double cost_b);

/// (f_i - f_n) / (f_1 - f_n). Constant traces map to zeros.
/// Throws InvalidParameters for traces shorter than 2.
std::vector<double> normalize_trace(std::span<const double> trace);

/// Pointwise mean of traces after padding each to the longest length by
/// holding its last value.
std::vector<double> average_traces(std::span<const std::vector<double>> traces);

struct SampleSummary {
  double min = 0.0;
  double mean = 0.0;
  double stddev = 0.0;  // sample (n-1); 0 for n = 1
  double cv = 0.0;      // stddev / mean
};

SampleSummary summarize_sample(std::span<const double> values);

}  // namespace cluspt
