#include <doctest.h>

#include "til/common.hpp"
#include "til/rng.hpp"
#include "til/stats.hpp"

#include <cmath>

using namespace til;

TEST_CASE("mean and standard error") {
  auto e = mean_se({1.0, 2.0, 3.0, 4.0});
  CHECK(e.mean == 2.5);
  CHECK(e.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK_THROWS_AS(mean_se({1.0}), DomainError);
}

TEST_CASE("weighted mean reduces to the plain mean for equal weights") {
  std::vector<double> a{1.0, 4.0, 2.0, 7.0};
  auto w = weighted_mean(a, {2.0, 2.0, 2.0, 2.0});
  auto m = mean_se(a);
  CHECK(w.mean == doctest::Approx(m.mean));
  CHECK(w.se == doctest::Approx(m.se));
  CHECK(weighted_mean({1.0, 3.0}, {3.0, 1.0}).mean == doctest::Approx(1.5));
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK_THROWS_AS(median({}), DomainError);
}

TEST_CASE("chi-square upper tail, reference values") {
  CHECK(chi_square_sf(3.84, 1) == doctest::Approx(0.05004352124870519).epsilon(1e-10));
  CHECK(chi_square_sf(10, 4) == doctest::Approx(0.04042768199451279).epsilon(1e-10));
  CHECK(chi_square_sf(0.5, 3) == doctest::Approx(0.9188914116546758).epsilon(1e-10));
  CHECK(chi_square_sf(0.0, 3) == 1.0);
}

TEST_CASE("two-sample KS") {
  double d = 0.0;
  CHECK(ks_two_sample_pvalue({1, 2, 3, 4}, {1, 2, 3, 4}, &d) == 1.0);
  CHECK(d == 0.0);
  ks_two_sample_pvalue({1, 2, 3, 4}, {3, 4, 5, 6}, &d);
  CHECK(d == doctest::Approx(0.5));

  Rng rng(1);
  std::vector<double> a, b, c;
  for (int k = 0; k < 3000; ++k) {
    a.push_back(rng.normal());
    b.push_back(rng.normal());
    c.push_back(rng.normal() + 0.3);
  }
  CHECK(ks_two_sample_pvalue(a, b) > 0.01);
  CHECK(ks_two_sample_pvalue(a, c) < 1e-6);

  // null calibration: roughly 5% rejections at level 0.05
  int reject = 0;
  for (int rep = 0; rep < 400; ++rep) {
    std::vector<double> x, y;
    for (int k = 0; k < 300; ++k) {
      x.push_back(rng.uniform());
      y.push_back(rng.uniform());
    }
    reject += ks_two_sample_pvalue(x, y) < 0.05;
  }
  CHECK(reject > 5);
  CHECK(reject < 40);
}

TEST_CASE("ols slope") {
  CHECK(ols_slope({1, 2, 3}, {2, 4, 6}) == doctest::Approx(2.0));
  CHECK(ols_slope({0, 1, 2, 3}, {1, 1, 1, 1}) == doctest::Approx(0.0));
}
