#include "cluspt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>

#include "cluspt/error.hpp"

namespace cluspt::stats {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::size_t> ascending_order(std::span<const double> p) {
  std::vector<std::size_t> o(p.size());
  std::iota(o.begin(), o.end(), 0);
  std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  return o;
}

std::vector<double> row_ranks(const ResultMatrix& m, std::size_t d) {
  return mid_ranks(std::span<const double>(m.values).subspan(d * m.algorithms, m.algorithms));
}

void require_shape(const ResultMatrix& m) {
  if (m.algorithms < 2 || m.datasets < 2)
    throw InvalidParameters("need at least 2 algorithms and 2 datasets");
  if (m.values.size() != m.algorithms * m.datasets)
    throw InvalidParameters("result matrix has missing cells");
  for (double v : m.values)
    if (!std::isfinite(v)) throw InvalidParameters("result matrix has non-finite cells");
}

/// Sum of t^3 - t over tie groups of already sorted values.
double tie_term(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    const double t = static_cast<double>(j - i);
    sum += t * t * t - t;
    i = j;
  }
  return sum;
}

}  // namespace

double chi_squared_sf(double x, double df) {
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), x));
}

double f_sf(double x, double df1, double df2) {
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::cdf(boost::math::complement(boost::math::fisher_f(df1, df2), x));
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

std::vector<double> mid_ranks(std::span<const double> values) {
  const auto order = ascending_order(values);
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = mid;
    i = j;
  }
  return ranks;
}

OmnibusTest friedman_test(const ResultMatrix& m) {
  require_shape(m);
  const auto n = static_cast<double>(m.datasets);
  const auto k = static_cast<double>(m.algorithms);
  OmnibusTest t;
  t.average_ranks.assign(m.algorithms, 0.0);
  for (std::size_t d = 0; d < m.datasets; ++d) {
    const auto r = row_ranks(m, d);
    for (std::size_t j = 0; j < m.algorithms; ++j) t.average_ranks[j] += r[j];
  }
  double sum_sq = 0.0;
  for (double& r : t.average_ranks) {
    r /= n;
    sum_sq += r * r;
  }
  t.statistic = 12.0 * n / (k * (k + 1.0)) * (sum_sq - k * (k + 1.0) * (k + 1.0) / 4.0);
  if (std::abs(t.statistic) < 1e-12) t.statistic = 0.0;
  t.df1 = k - 1.0;
  t.p_value = chi_squared_sf(t.statistic, t.df1);
  return t;
}

OmnibusTest iman_davenport(const OmnibusTest& friedman, std::size_t datasets,
                           std::size_t algorithms) {
  const auto n = static_cast<double>(datasets);
  const auto k = static_cast<double>(algorithms);
  OmnibusTest t;
  t.average_ranks = friedman.average_ranks;
  t.df1 = k - 1.0;
  t.df2 = (k - 1.0) * (n - 1.0);
  const double denom = n * (k - 1.0) - friedman.statistic;
  if (denom <= 0.0) {
    // Every dataset ranks the algorithms identically.
    t.statistic = kInf;
    t.p_value = 0.0;
  } else {
    t.statistic = (n - 1.0) * friedman.statistic / denom;
    t.p_value = f_sf(t.statistic, t.df1, t.df2);
  }
  return t;
}

OmnibusTest aligned_friedman_test(const ResultMatrix& m) {
  require_shape(m);
  const std::size_t nd = m.datasets;
  const std::size_t na = m.algorithms;
  const auto n = static_cast<double>(nd);
  const auto k = static_cast<double>(na);

  std::vector<double> aligned(nd * na);
  for (std::size_t d = 0; d < nd; ++d) {
    double mean = 0.0;
    for (std::size_t j = 0; j < na; ++j) mean += m.at(d, j);
    mean /= k;
    for (std::size_t j = 0; j < na; ++j) aligned[d * na + j] = m.at(d, j) - mean;
  }
  const auto ranks = mid_ranks(aligned);

  std::vector<double> col(na, 0.0);
  std::vector<double> row(nd, 0.0);
  for (std::size_t d = 0; d < nd; ++d)
    for (std::size_t j = 0; j < na; ++j) {
      col[j] += ranks[d * na + j];
      row[d] += ranks[d * na + j];
    }
  double col_sq = 0.0;
  double row_sq = 0.0;
  for (double c : col) col_sq += c * c;
  for (double r : row) row_sq += r * r;

  const double kn = k * n;
  const double numer = (k - 1.0) * (col_sq - (k * n * n / 4.0) * (kn + 1.0) * (kn + 1.0));
  const double denom = kn * (kn + 1.0) * (2.0 * kn + 1.0) / 6.0 - row_sq / k;
  if (!(denom > 1e-12)) throw DegenerateInput("aligned ranks are all tied");

  OmnibusTest t;
  t.average_ranks.resize(na);
  for (std::size_t j = 0; j < na; ++j) t.average_ranks[j] = col[j] / n;
  t.statistic = std::max(0.0, numer / denom);
  t.df1 = k - 1.0;
  t.p_value = chi_squared_sf(t.statistic, t.df1);
  return t;
}

OmnibusTest quade_test(const ResultMatrix& m) {
  require_shape(m);
  const std::size_t nd = m.datasets;
  const std::size_t na = m.algorithms;
  const auto n = static_cast<double>(nd);
  const auto k = static_cast<double>(na);

  std::vector<double> range(nd);
  for (std::size_t d = 0; d < nd; ++d) {
    const auto row = std::span<const double>(m.values).subspan(d * na, na);
    const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
    range[d] = *hi - *lo;
  }
  if (std::all_of(range.begin(), range.end(), [](double r) { return r == 0.0; }))
    throw DegenerateInput("every dataset has zero range");
  const auto q = mid_ranks(range);

  double a = 0.0;
  std::vector<double> s(na, 0.0);
  std::vector<double> weighted(na, 0.0);
  for (std::size_t d = 0; d < nd; ++d) {
    const auto r = row_ranks(m, d);
    for (std::size_t j = 0; j < na; ++j) {
      const double sij = q[d] * (r[j] - (k + 1.0) / 2.0);
      a += sij * sij;
      s[j] += sij;
      weighted[j] += q[d] * r[j];
    }
  }
  double b = 0.0;
  for (double sj : s) b += sj * sj;
  b /= n;

  OmnibusTest t;
  t.average_ranks.resize(na);
  for (std::size_t j = 0; j < na; ++j) t.average_ranks[j] = weighted[j] / (n * (n + 1.0) / 2.0);
  t.df1 = k - 1.0;
  t.df2 = (k - 1.0) * (n - 1.0);
  if (a - b <= 1e-12 * a) {
    t.statistic = kInf;
    t.p_value = 0.0;
  } else {
    t.statistic = (n - 1.0) * b / (a - b);
    t.p_value = f_sf(t.statistic, t.df1, t.df2);
  }
  return t;
}

std::vector<double> holm(std::span<const double> p) {
  const std::size_t m = p.size();
  const auto o = ascending_order(p);
  std::vector<double> out(m);
  double running = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    running = std::max(running, std::min(1.0, static_cast<double>(m - i) * p[o[i]]));
    out[o[i]] = running;
  }
  return out;
}

std::vector<double> holland(std::span<const double> p) {
  const std::size_t m = p.size();
  const auto o = ascending_order(p);
  std::vector<double> out(m);
  double running = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double adj = 1.0 - std::pow(1.0 - p[o[i]], static_cast<double>(m - i));
    running = std::max(running, std::min(1.0, adj));
    out[o[i]] = running;
  }
  return out;
}

std::vector<double> hochberg(std::span<const double> p) {
  const std::size_t m = p.size();
  const auto o = ascending_order(p);
  std::vector<double> out(m);
  double running = 1.0;
  for (std::size_t i = m; i-- > 0;) {
    running = std::min(running, static_cast<double>(m - i) * p[o[i]]);
    out[o[i]] = std::min(1.0, running);
  }
  return out;
}

std::vector<double> hommel(std::span<const double> p) {
  const std::size_t n = p.size();
  if (n <= 2) return n == 2 ? hochberg(p) : std::vector<double>(p.begin(), p.end());
  const auto o = ascending_order(p);
  std::vector<double> ps(n);
  for (std::size_t i = 0; i < n; ++i) ps[i] = p[o[i]];

  double init = kInf;
  for (std::size_t i = 0; i < n; ++i)
    init = std::min(init, static_cast<double>(n) * ps[i] / static_cast<double>(i + 1));
  std::vector<double> q(n, init);
  std::vector<double> pa(n, init);
  for (std::size_t m = n - 1; m >= 2; --m) {
    // Sorted positions 0..n-m form the first block, the rest the second.
    const std::size_t split = n - m + 1;
    double q1 = kInf;
    for (std::size_t j = split; j < n; ++j)
      q1 = std::min(q1, static_cast<double>(m) * ps[j] / static_cast<double>(j - split + 2));
    for (std::size_t j = 0; j < split; ++j) q[j] = std::min(static_cast<double>(m) * ps[j], q1);
    for (std::size_t j = split; j < n; ++j) q[j] = q[split - 1];
    for (std::size_t j = 0; j < n; ++j) pa[j] = std::max(pa[j], q[j]);
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[o[i]] = std::min(1.0, std::max(pa[i], ps[i]));
  return out;
}

PostHoc post_hoc(const OmnibusTest& test, RankFamily family, std::size_t datasets) {
  const std::size_t na = test.average_ranks.size();
  const auto k = static_cast<double>(na);
  const auto n = static_cast<double>(datasets);
  double se = 0.0;
  switch (family) {
    case RankFamily::kFriedman:
      se = std::sqrt(k * (k + 1.0) / (6.0 * n));
      break;
    case RankFamily::kAligned:
      se = std::sqrt(k * (n + 1.0) / 6.0);
      break;
    case RankFamily::kQuade:
      se = std::sqrt(k * (k + 1.0) * (2.0 * n + 1.0) * (k - 1.0) / (18.0 * n * (n + 1.0)));
      break;
  }

  PostHoc ph;
  ph.control = static_cast<std::size_t>(
      std::min_element(test.average_ranks.begin(), test.average_ranks.end()) -
      test.average_ranks.begin());
  for (std::size_t j = 0; j < na; ++j) {
    if (j == ph.control) continue;
    Comparison c;
    c.algorithm = j;
    c.z = (test.average_ranks[j] - test.average_ranks[ph.control]) / se;
    c.p_value = std::min(1.0, 2.0 * normal_sf(std::abs(c.z)));
    ph.comparisons.push_back(c);
  }
  std::stable_sort(ph.comparisons.begin(), ph.comparisons.end(),
                   [](const Comparison& a, const Comparison& b) { return a.p_value < b.p_value; });
  std::vector<double> p;
  for (const auto& c : ph.comparisons) p.push_back(c.p_value);
  const auto h1 = holm(p);
  const auto h2 = holland(p);
  const auto h3 = hochberg(p);
  const auto h4 = hommel(p);
  for (std::size_t i = 0; i < p.size(); ++i) {
    ph.comparisons[i].holm = h1[i];
    ph.comparisons[i].holland = h2[i];
    ph.comparisons[i].hochberg = h3[i];
    ph.comparisons[i].hommel = h4[i];
  }
  return ph;
}

WilcoxonResult wilcoxon(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidParameters("paired samples differ in length");
  WilcoxonResult w;
  std::vector<double> diff;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d == 0.0)
      ++w.ties;
    else
      diff.push_back(d);
  }
  w.n = diff.size();
  if (w.n == 0) return w;

  std::vector<double> magnitude(diff.size());
  for (std::size_t i = 0; i < diff.size(); ++i) magnitude[i] = std::abs(diff[i]);
  const auto ranks = mid_ranks(magnitude);
  for (std::size_t i = 0; i < diff.size(); ++i) (diff[i] < 0.0 ? w.r_plus : w.r_minus) += ranks[i];

  const auto n = static_cast<double>(w.n);
  const double mean = n * (n + 1.0) / 4.0;
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term(magnitude) / 48.0;
  if (!(var > 0.0)) return w;
  const double sd = std::sqrt(var);
  const double delta = w.r_plus - mean;
  const double corrected = std::max(std::abs(delta) - 0.5, 0.0);
  w.z = (delta < 0.0 ? -corrected : corrected) / sd;
  w.p_two_sided = std::min(1.0, 2.0 * normal_sf(std::abs(w.z)));
  w.p_one_sided = normal_sf((delta - 0.5) / sd);
  return w;
}

SuiteReport friedman_suite(const ResultMatrix& m) {
  require_shape(m);
  SuiteReport r;
  r.friedman = friedman_test(m);
  r.iman_davenport = iman_davenport(r.friedman, m.datasets, m.algorithms);
  r.friedman_post_hoc = post_hoc(r.friedman, RankFamily::kFriedman, m.datasets);
  try {
    r.aligned = aligned_friedman_test(m);
    r.aligned_post_hoc = post_hoc(*r.aligned, RankFamily::kAligned, m.datasets);
  } catch (const DegenerateInput&) {
  }
  try {
    r.quade = quade_test(m);
    r.quade_post_hoc = post_hoc(*r.quade, RankFamily::kQuade, m.datasets);
  } catch (const DegenerateInput&) {
  }
  for (std::size_t a = 0; a < m.algorithms; ++a) {
    for (std::size_t b = a + 1; b < m.algorithms; ++b) {
      std::vector<double> xa(m.datasets);
      std::vector<double> xb(m.datasets);
      for (std::size_t d = 0; d < m.datasets; ++d) {
        xa[d] = m.at(d, a);
        xb[d] = m.at(d, b);
      }
      r.wilcoxon.push_back({a, b, wilcoxon(xa, xb)});
    }
  }
  return r;
}

namespace {

std::string name_of(const ResultMatrix& m, std::size_t j) {
  return j < m.algorithm_names.size() ? m.algorithm_names[j] : "A" + std::to_string(j + 1);
}

void write_omnibus(std::ostream& os, const std::string& title, const OmnibusTest& t,
                   const ResultMatrix& m) {
  os << title << ": statistic = " << t.statistic << ", df = " << t.df1;
  if (t.df2 > 0.0) os << "/" << t.df2;
  os << ", p = " << t.p_value << "\n";
  for (std::size_t j = 0; j < t.average_ranks.size(); ++j)
    os << "  " << name_of(m, j) << " rank " << t.average_ranks[j] << "\n";
}

void write_post_hoc(std::ostream& os, const std::string& title, const PostHoc& ph,
                    const ResultMatrix& m) {
  os << title << " post-hoc (control " << name_of(m, ph.control) << ")\n";
  os << "  algorithm,z,p,holm,holland,hochberg,hommel\n";
  for (const auto& c : ph.comparisons)
    os << "  " << name_of(m, c.algorithm) << "," << c.z << "," << c.p_value << "," << c.holm
       << "," << c.holland << "," << c.hochberg << "," << c.hommel << "\n";
}

}  // namespace

std::string format_report(const SuiteReport& report, const ResultMatrix& m) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "datasets = " << m.datasets << ", algorithms = " << m.algorithms << "\n";
  write_omnibus(os, "Friedman", report.friedman, m);
  write_omnibus(os, "Iman-Davenport", report.iman_davenport, m);
  write_post_hoc(os, "Friedman", report.friedman_post_hoc, m);
  if (report.aligned) {
    write_omnibus(os, "Friedman Aligned", *report.aligned, m);
    write_post_hoc(os, "Friedman Aligned", *report.aligned_post_hoc, m);
  } else {
    os << "Friedman Aligned: undefined for this input\n";
  }
  if (report.quade) {
    write_omnibus(os, "Quade", *report.quade, m);
    write_post_hoc(os, "Quade", *report.quade_post_hoc, m);
  } else {
    os << "Quade: undefined for this input\n";
  }
  os << "Wilcoxon signed-rank\n";
  os << "  a,b,n,R+,R-,z,p_two_sided,p_one_sided\n";
  for (const auto& w : report.wilcoxon)
    os << "  " << name_of(m, w.a) << "," << name_of(m, w.b) << "," << w.result.n << ","
       << w.result.r_plus << "," << w.result.r_minus << "," << w.result.z << ","
       << w.result.p_two_sided << "," << w.result.p_one_sided << "\n";
  return os.str();
}

}  // namespace cluspt::stats
