#include <cmath>

#include "cluspt/error.hpp"
#include "cluspt/metrics.hpp"
#include "cluspt/rng.hpp"
#include "doctest.h"

using namespace cluspt;

TEST_SUITE("metrics") {
  TEST_CASE("rpd") {
    CHECK(rpd(100, 100) == 0.0);
    CHECK(rpd(110, 100) == doctest::Approx(10.0));
    CHECK(rpd(219283.5, 214115.3) == doctest::Approx(2.4137).epsilon(1e-4));
    CHECK(rpd(19278.3, 19264.5) == doctest::Approx(0.0716).epsilon(1e-3));
    CHECK_THROWS_AS(rpd(1, 0), InvalidBaseline);
    CHECK_THROWS_AS(rpd(1, -2), InvalidBaseline);
  }

  TEST_CASE("pi_gap") {
    CHECK(pi_gap(5, 5) == 0.0);
    CHECK(pi_gap(214115.3, 219283.5) == doctest::Approx(2.3569).epsilon(1e-4));
    CHECK_THROWS_AS(pi_gap(1, 0), InvalidBaseline);
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
      const double a = rng.uniform(1, 100), b = rng.uniform(1, 100);
      CHECK((pi_gap(a, b) > 0) == (a < b));
      CHECK(rpd(a, a) == 0.0);
      CHECK(pi_gap(a, a) == 0.0);
    }
  }

  TEST_CASE("normalize_trace") {
    const std::vector<double> t{100, 70, 40};
    CHECK(normalize_trace(t) == std::vector<double>{1, 0.5, 0});
    const std::vector<double> flat{5, 5, 5};
    CHECK(normalize_trace(flat) == std::vector<double>{0, 0, 0});
    const std::vector<double> one{3};
    CHECK_THROWS_AS(normalize_trace(one), InvalidParameters);
    Rng rng(2);
    for (int i = 0; i < 500; ++i) {
      std::vector<double> tr{rng.uniform(1e3, 1e6)};
      const std::size_t n = 2 + rng.index(50);
      while (tr.size() < n) tr.push_back(tr.back() - rng.uniform(0, 1e3) * rng.index(2));
      const auto nt = normalize_trace(tr);
      if (tr.front() == tr.back()) continue;
      CHECK(nt.front() == 1.0);
      CHECK(nt.back() == 0.0);
    }
  }

  TEST_CASE("average_traces pads with the last value") {
    const std::vector<std::vector<double>> traces{{1, 0.5, 0}, {1, 0}};
    CHECK(average_traces(traces) == std::vector<double>{1, 0.25, 0});
    CHECK(average_traces(std::span<const std::vector<double>>{}).empty());
  }

  TEST_CASE("summarize_sample") {
    const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
    const auto s = summarize_sample(v);
    CHECK(s.min == 2);
    CHECK(s.mean == 5);
    CHECK(s.stddev == doctest::Approx(std::sqrt(32.0 / 7.0)));
    CHECK(s.cv == doctest::Approx(std::sqrt(32.0 / 7.0) / 5));
    const std::vector<double> single{3};
    CHECK(summarize_sample(single).stddev == 0.0);
    CHECK(summarize_sample(single).cv == 0.0);
  }
}
