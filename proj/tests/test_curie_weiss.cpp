#include <doctest.h>

#include "til/curie_weiss.hpp"
#include "til/glauber.hpp"
#include "til/spin_space.hpp"
#include "til/stats.hpp"
#include "til/tensor.hpp"

#include <bit>
#include <cmath>

using namespace til;

namespace {

double grid_min(double p, int points) {
  double best = 1e300;
  for (int k = 1; k < points; ++k) best = std::min(best, beta_star_objective(static_cast<double>(k) / points, p));
  return best;
}

}  // namespace

TEST_CASE("beta star") {
  CHECK(beta_star(4.0) == doctest::Approx(0.50425).epsilon(2e-4));
  CHECK(std::abs(beta_star(4.0) - 0.5042495) < 1e-6);
  // p = 2: the infimum is the x -> 0 limit 1/2
  CHECK(std::abs(beta_star(2.0, 1e-10) - 0.5) < 1e-8);
  for (double p : {3.0, 4.0, 5.0, 6.0}) CHECK(std::abs(beta_star(p) - grid_min(p, 1'000'000)) < 1e-9);
  CHECK(std::abs(beta_star(4.0, 1e-8) - beta_star(4.0, 1e-11)) < 1e-9);
  CHECK_THROWS_AS(beta_star(1.0), DomainError);
  CHECK_THROWS_AS(beta_star(4.0, 0.0), DomainError);
}

TEST_CASE("exact transitions") {
  const int n = 10;
  for (int s = -n; s <= n; s += 2) {
    auto t = exact_transitions(n, 4.0, 0.0, s);
    CHECK(t.up == doctest::Approx(0.25 * (1.0 - static_cast<double>(s) / n)));
    CHECK(t.down == doctest::Approx(0.25 * (1.0 + static_cast<double>(s) / n)));
  }
  CHECK(exact_transitions(n, 4.0, 1.0, n).up == 0.0);
  CHECK(exact_transitions(n, 4.0, 1.0, -n).down == 0.0);
  CHECK_THROWS_AS(exact_transitions(n, 4.0, 1.0, 3), DomainError);
  CHECK_THROWS_AS(exact_transitions(n, 4.0, 1.0, 12), DomainError);

  for (double beta : {0.3, 0.7, 2.0}) {
    MagnetizationChain c(n, 4.0, beta);
    for (int s = -n; s <= n; s += 2) {
      const auto& t = c.at(s);
      CHECK(t.up + t.stay + t.down == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(t.stay >= 0.0);
      CHECK(t.up == c.at(-s).down);
    }
  }
}

TEST_CASE("exact transitions match the lumped full kernel") {
  const int n = 4;
  const double beta = 1.0;
  Vec H = curie_weiss_potential(n, beta, 4.0);
  auto K = build_kernel(H, n);
  for (std::size_t x = 0; x < 16; ++x) {
    const int s = 2 * std::popcount(x) - n;
    double up = 0.0, down = 0.0;
    for (std::size_t y = 0; y < 16; ++y) {
      const int sy = 2 * std::popcount(y) - n;
      if (sy == s + 2) up += K.transition()(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
      if (sy == s - 2) down += K.transition()(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
    }
    auto t = exact_transitions(n, 4.0, beta, s);
    CHECK(t.up == doctest::Approx(up).epsilon(1e-13));
    CHECK(t.down == doctest::Approx(down).epsilon(1e-13));
  }
}

TEST_CASE("asymptotic transitions differ by O(1/n)") {
  const double beta = 0.7;
  std::vector<double> scaled;
  for (int n : {50, 100, 200, 400}) {
    double worst = 0.0;
    for (int s = -n; s <= n; s += 2) {
      auto a = asymptotic_transitions(n, 4.0, beta, s);
      auto e = exact_transitions(n, 4.0, beta, s);
      worst = std::max({worst, std::abs(a.up - e.up), std::abs(a.down - e.down)});
    }
    scaled.push_back(worst * n);
  }
  // n * error settles to a constant
  CHECK(scaled.back() < 1.2 * scaled.front());
  CHECK(scaled.back() < 10.0);
}

TEST_CASE("stationary law") {
  for (int n : {5, 20, 60}) {
    MagnetizationChain c(n, 4.0, 0.7);
    Vec a = c.stationary(), b = c.stationary_direct();
    CHECK(0.5 * (a - b).cwiseAbs().sum() < 1e-10);
    // stationary under the chain's own kernel
    CHECK((a.transpose() * c.transition_matrix() - a.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
  // lumped Gibbs measure on the cube
  const int n = 6;
  auto mu = DiscreteMeasure::gibbs(n, curie_weiss_potential(n, 0.9, 4.0));
  Vec lump = Vec::Zero(n + 1);
  for (std::size_t x = 0; x < mu.size(); ++x) lump[std::popcount(x)] += mu[x];
  CHECK((lump - MagnetizationChain(n, 4.0, 0.9).stationary()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("bias interval") {
  const double bs = beta_star(4.0);
  CHECK_FALSE(bias_interval(100, 4.0, bs - 0.05).has_value());
  auto fine = bias_interval(100, 4.0, bs + 0.05, 0.01, 100000);
  auto coarse = bias_interval(100, 4.0, bs + 0.05);
  REQUIRE(coarse.has_value());
  REQUIRE(fine.has_value());
  CHECK(std::abs(coarse->first - fine->first) < 1e-3);
  CHECK(std::abs(coarse->second - fine->second) < 1e-3);
  auto hot = bias_interval(100, 4.0, 1e4);
  REQUIRE(hot.has_value());
  CHECK(hot->first < 0.05);
  CHECK(hot->second > 0.98);
}

TEST_CASE("escape probability") {
  CHECK(escape_probability_bound(1.0, 3) == 0.0);
  CHECK(escape_probability_bound(0.75, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(std::log(escape_probability_bound(0.7, 8)) == doctest::Approx(2.0 * std::log(escape_probability_bound(0.7, 4))));
  CHECK_THROWS_AS(escape_probability_bound(0.5, 1), DomainError);
  CHECK_THROWS_AS(escape_probability_bound(0.75, 0), DomainError);

  Rng rng(1);
  const long runs = 100000;
  const double f = simulate_escape_frequency(0.75, 1, runs, rng);
  const double p = 1.0 / 3.0;
  CHECK(std::abs(f - p) < 3.0 * std::sqrt(p * (1 - p) / runs));
  const double f3 = simulate_escape_frequency(0.6, 3, runs, rng);
  const double p3 = escape_probability_bound(0.6, 3);
  CHECK(f3 <= p3 + 3.0 * std::sqrt(p3 * (1 - p3) / runs));
}

TEST_CASE("hitting times") {
  Rng rng(2);
  const int n = 20;
  MagnetizationChain free(n, 4.0, 0.0);
  std::vector<double> t;
  for (int k = 0; k < 401; ++k) t.push_back(static_cast<double>(hitting_time(free, n, 100000000, rng).steps));
  const double med = median(t);
  CHECK(med >= n);
  CHECK(med <= 20.0 * n * std::log(static_cast<double>(n)));

  // sign symmetry of the chain
  MagnetizationChain c(16, 4.0, 0.5);
  std::vector<double> pos, neg;
  for (int k = 0; k < 2000; ++k) {
    pos.push_back(static_cast<double>(hitting_time(c, 16, 100000000, rng).steps));
    neg.push_back(static_cast<double>(hitting_time(c, -16, 100000000, rng).steps));
  }
  CHECK(ks_two_sample_pvalue(pos, neg) > 0.01);

  // censoring reports the budget
  MagnetizationChain cold(40, 4.0, 2.0);
  auto rec = hitting_time(cold, 40, 1000, rng);
  CHECK(rec.censored);
  CHECK(rec.steps == 1000);
  CHECK_THROWS_AS(hitting_time(c, 0, 10, rng), DomainError);
}

TEST_CASE("hitting-time experiment is deterministic and thread-independent") {
  auto a = hitting_time_experiment({10, 20}, 4.0, 0.3, 8, 99, 1000000, 1);
  auto b = hitting_time_experiment({10, 20}, 4.0, 0.3, 8, 99, 1000000, 3);
  REQUIRE(a.size() == 16);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].steps == b[k].steps);
    CHECK(a[k].seed == b[k].seed);
    CHECK(a[k].n == (k < 8 ? 10 : 20));
  }
  auto s = summarize_hitting(a);
  REQUIRE(s.size() == 2);
  CHECK(s[0].runs == 8);
  CHECK(s[0].censored == 0);
}

TEST_CASE("lumping fidelity") {
  Rng rng(3);
  auto r = lumping_fidelity(8, 4.0, 0.7, 20, 100000, rng);
  CHECK(r.p_value > 0.01);
  CHECK(r.dof >= 1);
}
