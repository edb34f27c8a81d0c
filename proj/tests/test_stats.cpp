#include <algorithm>
#include <cmath>
#include <numeric>

#include "cluspt/error.hpp"
#include "cluspt/rng.hpp"
#include "cluspt/stats.hpp"
#include "doctest.h"

using namespace cluspt;
using namespace cluspt::stats;

namespace {

ResultMatrix matrix(std::size_t datasets, std::size_t algorithms, std::vector<double> v) {
  ResultMatrix m;
  m.datasets = datasets;
  m.algorithms = algorithms;
  m.values = std::move(v);
  return m;
}

ResultMatrix random_matrix(std::size_t nd, std::size_t na, Rng& rng) {
  std::vector<double> v(nd * na);
  for (double& x : v) x = static_cast<double>(rng.index(1000));
  return matrix(nd, na, v);
}

/// Hommel adjusted p-values by closed testing with Simes local tests: the
/// maximum Simes p over every subset containing the hypothesis.
std::vector<double> hommel_closed(const std::vector<double>& p) {
  const std::size_t m = p.size();
  std::vector<double> out(m, 0.0);
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    std::vector<double> sub;
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1) sub.push_back(p[i]);
    std::sort(sub.begin(), sub.end());
    double simes = 1.0;
    for (std::size_t j = 0; j < sub.size(); ++j)
      simes = std::min(simes, static_cast<double>(sub.size()) * sub[j] / static_cast<double>(j + 1));
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1) out[i] = std::max(out[i], simes);
  }
  return out;
}

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("mid ranks average ties") {
    const std::vector<double> v{3, 1, 3, 2};
    CHECK(mid_ranks(v) == std::vector<double>{3.5, 1, 3.5, 2});
  }

  TEST_CASE("Friedman on identical inputs is zero") {
    const auto m = matrix(4, 3, std::vector<double>(12, 7.0));
    const auto f = friedman_test(m);
    CHECK(f.statistic == 0.0);
    CHECK(f.p_value == doctest::Approx(1.0));
    CHECK(f.average_ranks == std::vector<double>{2, 2, 2});
    CHECK(aligned_friedman_test(m).statistic == 0.0);
    CHECK_THROWS_AS(quade_test(m), DegenerateInput);
    const auto suite = friedman_suite(m);
    CHECK_FALSE(suite.quade.has_value());
  }

  TEST_CASE("Friedman on a fixed ranking") {
    const auto m = matrix(4, 3, {1, 2, 3, 10, 20, 30, 5, 6, 7, 0.1, 0.2, 0.3});
    const auto f = friedman_test(m);
    // 12*4/(3*4) * ((1-2)^2 + 0 + (3-2)^2)
    CHECK(f.statistic == doctest::Approx(8.0));
    CHECK(f.p_value == doctest::Approx(std::exp(-4.0)));
    CHECK(f.df1 == 2.0);
    const auto id = iman_davenport(f, 4, 3);
    CHECK(std::isinf(id.statistic));
    CHECK(id.p_value == 0.0);
  }

  TEST_CASE("Friedman agrees with the rank-sum formula") {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t nd = 2 + rng.index(10), na = 2 + rng.index(5);
      const auto m = random_matrix(nd, na, rng);
      std::vector<double> rank_sum(na, 0.0);
      bool ties = false;
      for (std::size_t d = 0; d < nd; ++d)
        for (std::size_t j = 0; j < na; ++j) {
          double r = 1.0;
          for (std::size_t l = 0; l < na; ++l) {
            if (l == j) continue;
            if (m.at(d, l) < m.at(d, j)) r += 1.0;
            if (m.at(d, l) == m.at(d, j)) ties = true;
          }
          rank_sum[j] += r;
        }
      if (ties) continue;
      const double n = static_cast<double>(nd), k = static_cast<double>(na);
      double ss = 0.0;
      for (double r : rank_sum) ss += r * r;
      const double expected = 12.0 / (n * k * (k + 1.0)) * ss - 3.0 * n * (k + 1.0);
      CHECK(friedman_test(m).statistic == doctest::Approx(expected).epsilon(1e-9));
    }
  }

  TEST_CASE("Friedman is invariant under algorithm permutation") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t nd = 3 + rng.index(8), na = 3 + rng.index(4);
      const auto m = random_matrix(nd, na, rng);
      std::vector<std::size_t> perm(na);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng.engine());
      ResultMatrix p = m;
      for (std::size_t d = 0; d < nd; ++d)
        for (std::size_t j = 0; j < na; ++j) p.values[d * na + j] = m.at(d, perm[j]);
      const auto a = friedman_test(m), b = friedman_test(p);
      CHECK(a.statistic == doctest::Approx(b.statistic));
      for (std::size_t j = 0; j < na; ++j)
        CHECK(b.average_ranks[j] == doctest::Approx(a.average_ranks[perm[j]]));
      const auto qa = quade_test(m), qb = quade_test(p);
      CHECK(qa.statistic == doctest::Approx(qb.statistic));
      const auto fa = aligned_friedman_test(m), fb = aligned_friedman_test(p);
      CHECK(fa.statistic == doctest::Approx(fb.statistic));
    }
  }

  TEST_CASE("shape checks") {
    CHECK_THROWS_AS(friedman_test(matrix(1, 3, {1, 2, 3})), InvalidParameters);
    CHECK_THROWS_AS(friedman_test(matrix(3, 1, {1, 2, 3})), InvalidParameters);
  }

  TEST_CASE("adjustments on a fixed vector") {
    const std::vector<double> p{0.01, 0.02, 0.04};
    const auto h = holm(p);
    CHECK(h[0] == doctest::Approx(0.03));
    CHECK(h[1] == doctest::Approx(0.04));
    CHECK(h[2] == doctest::Approx(0.04));
    const auto hb = hochberg(p);
    CHECK(hb == std::vector<double>{hb[0], 0.04, 0.04});
    CHECK(hb[0] == doctest::Approx(0.03));
    const auto hl = holland(p);
    CHECK(hl[0] == doctest::Approx(1 - std::pow(0.99, 3)));
    CHECK(hl[1] == doctest::Approx(1 - std::pow(0.98, 2)));
    CHECK(hl[2] == doctest::Approx(0.04));
  }

  TEST_CASE("adjustments are monotone and bounded") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> p(1 + rng.index(8));
      for (double& x : p) x = rng.uniform() * rng.uniform();
      std::vector<std::size_t> o(p.size());
      std::iota(o.begin(), o.end(), 0);
      std::sort(o.begin(), o.end(), [&](auto a, auto b) { return p[a] < p[b]; });
      for (const auto& adj : {holm(p), holland(p), hochberg(p), hommel(p)}) {
        for (std::size_t i = 0; i < p.size(); ++i) {
          CHECK(adj[i] >= p[i] - 1e-15);
          CHECK(adj[i] <= 1.0);
        }
        for (std::size_t i = 1; i < o.size(); ++i) CHECK(adj[o[i]] >= adj[o[i - 1]] - 1e-15);
      }
      const auto h = holm(p), hb = hochberg(p), hm = hommel(p);
      for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(hb[i] <= h[i] + 1e-15);
        CHECK(hm[i] <= hb[i] + 1e-15);
      }
    }
  }

  TEST_CASE("Hommel matches closed Simes testing") {
    Rng rng(9);
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<double> p(1 + rng.index(7));
      for (double& x : p) x = rng.uniform() * rng.uniform();
      if (trial % 5 == 0 && p.size() > 1) p[1] = p[0];
      const auto got = hommel(p);
      const auto want = hommel_closed(p);
      for (std::size_t i = 0; i < p.size(); ++i)
        CHECK(got[i] == doctest::Approx(std::min(1.0, want[i])).epsilon(1e-12));
    }
  }

  TEST_CASE("post-hoc picks the best-ranked control") {
    const auto m = matrix(5, 3, {3, 1, 2, 3, 1, 2, 2, 1, 3, 3, 1, 2, 3, 2, 1});
    const auto ph = post_hoc(friedman_test(m), RankFamily::kFriedman, 5);
    CHECK(ph.control == 1);
    REQUIRE(ph.comparisons.size() == 2);
    CHECK(ph.comparisons[0].p_value <= ph.comparisons[1].p_value);
    // Algorithm 0 averages rank 2.8 against 1.2, se = sqrt(12/30).
    const auto& c0 = ph.comparisons[0].algorithm == 0 ? ph.comparisons[0] : ph.comparisons[1];
    CHECK(c0.z == doctest::Approx(1.6 / std::sqrt(0.4)));
  }

  TEST_CASE("Wilcoxon extremes") {
    const std::vector<double> a{1, 2, 3, 4, 5};
    const std::vector<double> b{2, 4, 6, 8, 10};
    const auto w = wilcoxon(a, b);
    CHECK(w.n == 5);
    CHECK(w.r_minus == 0.0);
    CHECK(w.r_plus == 15.0);
    CHECK(w.p_one_sided == doctest::Approx(normal_sf(7.0 / std::sqrt(13.75))));
    CHECK(w.p_one_sided == doctest::Approx(0.02953).epsilon(1e-3));
    const auto r = wilcoxon(b, a);
    CHECK(r.r_plus == 0.0);
    CHECK(r.p_one_sided > 0.95);
    CHECK(r.p_two_sided == doctest::Approx(w.p_two_sided));
  }

  TEST_CASE("Wilcoxon drops zero differences") {
    const std::vector<double> a{1, 2, 3, 4};
    const std::vector<double> b{1, 3, 3, 6};
    const auto w = wilcoxon(a, b);
    CHECK(w.ties == 2);
    CHECK(w.n == 2);
    CHECK(w.r_plus == 3.0);
    const std::vector<double> same{5, 5};
    CHECK(wilcoxon(same, same).p_two_sided == 1.0);
    const std::vector<double> shorter{1};
    CHECK_THROWS_AS(wilcoxon(same, shorter), InvalidParameters);
  }

  TEST_CASE("distribution tails") {
    CHECK(chi_squared_sf(3.841458820694124, 1) == doctest::Approx(0.05));
    CHECK(f_sf(3.0, 2, 6) == doctest::Approx(0.125));
    CHECK(normal_sf(1.959963984540054) == doctest::Approx(0.025));
  }

  TEST_CASE("report mentions every test") {
    Rng rng(11);
    auto m = random_matrix(6, 3, rng);
    m.algorithm_names = {"GACSPT", "N-LSEA", "M-LSEA"};
    const auto text = format_report(friedman_suite(m), m);
    for (const char* s : {"Friedman", "Iman", "Aligned", "Quade", "holm", "hommel", "Wilcoxon",
                          "M-LSEA"})
      CHECK(text.find(s) != std::string::npos);
  }
}
