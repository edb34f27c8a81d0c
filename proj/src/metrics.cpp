#include "cluspt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cluspt/error.hpp"

namespace cluspt {

double rpd(double solution, double best) {
  if (!(best > 0.0)) throw InvalidBaseline("baseline cost must be positive");
  return (solution - best) / best * 100.0;
}

double pi_gap(double cost_a, double cost_b) {
  if (!(cost_b > 0.0)) throw InvalidBaseline("reference cost must be positive");
  return (cost_b - cost_a) / cost_b * 100.0;
}

std::vector<double> normalize_trace(std::span<const double> trace) {
  if (trace.size() < 2) throw InvalidParameters("trace needs at least two points");
  const double first = trace.front();
  const double last = trace.back();
  std::vector<double> out(trace.size(), 0.0);
  if (first == last) return out;
  const double span = first - last;
  for (std::size_t i = 0; i < trace.size(); ++i) out[i] = (trace[i] - last) / span;
  return out;
}

std::vector<double> average_traces(std::span<const std::vector<double>> traces) {
  std::size_t length = 0;
  for (const auto& t : traces) length = std::max(length, t.size());
  std::vector<double> sum(length, 0.0);
  std::size_t used = 0;
  for (const auto& t : traces) {
    if (t.empty()) continue;
    ++used;
    for (std::size_t i = 0; i < length; ++i) sum[i] += t[std::min(i, t.size() - 1)];
  }
  if (used > 0)
    for (double& v : sum) v /= static_cast<double>(used);
  return sum;
}

SampleSummary summarize_sample(std::span<const double> values) {
  SampleSummary s;
  if (values.empty()) return s;
  const auto n = static_cast<double>(values.size());
  s.min = *std::min_element(values.begin(), values.end());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (n - 1.0));
  }
  s.cv = s.mean != 0.0 ? s.stddev / s.mean : 0.0;
  return s;
}

}  // namespace cluspt
