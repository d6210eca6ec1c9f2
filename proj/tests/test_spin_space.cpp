#include <doctest.h>

#include "til/rng.hpp"
#include "til/spin_space.hpp"
#include "til/tensor.hpp"

#include <set>

using namespace til;

TEST_CASE("enumerate visits every configuration once in index order") {
  std::set<std::uint64_t> seen;
  std::size_t k = 0;
  for (const SpinConfig& c : enumerate(3)) {
    CHECK(c.index() == k++);
    seen.insert(c.bits);
  }
  CHECK(seen.size() == 8);

  auto one = enumerate(1);
  CHECK(one.size() == 2);
  CHECK((*one.begin()).spin(1) == -1);

  // bit 0 is coordinate 1
  std::vector<std::pair<int, int>> got;
  for (const SpinConfig& c : enumerate(2)) got.emplace_back(c.spin(1), c.spin(2));
  std::vector<std::pair<int, int>> want{{-1, -1}, {1, -1}, {-1, 1}, {1, 1}};
  CHECK(got == want);
}

TEST_CASE("dimension cap") {
  CHECK_THROWS_AS(enumerate(25), DimensionError);
  CHECK_THROWS_AS(enumerate(0), Error);
  CHECK_NOTHROW(enumerate(24));
}

TEST_CASE("flip is an involution and index round-trips") {
  for (const SpinConfig& c : enumerate(4)) {
    for (int i = 1; i <= 4; ++i) CHECK(c.flip(i).flip(i) == c);
    CHECK(SpinConfig::from_vector(c.vector()) == c);
    CHECK(SpinConfig::from_index(c.index(), 4) == c);
  }
  CHECK_THROWS_AS(SpinConfig::from_index(3, 2).flip(3), DomainError);
}

TEST_CASE("discrete derivative examples") {
  auto x1 = [](const Vec& x) { return x[0]; };
  auto x1x2 = [](const Vec& x) { return x[0] * x[1]; };
  for (const SpinConfig& c : enumerate(3)) {
    CHECK(discrete_derivative(x1, 1, c.vector()) == 1.0);
    if (c.spin(2) == -1) CHECK(discrete_derivative(x1x2, 1, c.vector()) == -1.0);
  }
  CHECK_THROWS_AS(discrete_derivative(x1, 4, Vec::Ones(3)), DomainError);
  CHECK_THROWS_AS(discrete_derivative(x1, 0, Vec::Ones(3)), DomainError);
}

TEST_CASE("derivative of <u,x>^2 matches 2 u_i <u, x with x_i zeroed>") {
  Rng rng(11);
  const int n = 4;
  Vec u = rng.normal_vector(n);
  auto F = [&](const Vec& x) { return std::pow(u.dot(x), 2); };
  Vec table = tabulate(n, F);
  for (const SpinConfig& c : enumerate(n)) {
    for (int i = 1; i <= n; ++i) {
      Vec xi = c.vector();
      xi[i - 1] = 0.0;
      const double want = 2.0 * u[i - 1] * u.dot(xi);
      CHECK(discrete_derivative(table, n, i, c.index()) == doctest::Approx(want).epsilon(1e-12));
      CHECK(discrete_derivative(F, i, c.vector()) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("mixed derivatives commute and do not depend on the differentiated coordinate") {
  Rng rng(5);
  const int n = 6;
  Vec F = rng.normal_vector(static_cast<Eigen::Index>(num_configs(n)));
  for (int i = 1; i <= n; ++i) {
    Vec di = discrete_derivative_table(F, n, i);
    for (const SpinConfig& c : enumerate(n)) CHECK(di[c.index()] == di[c.flip(i).index()]);
    for (int j = 1; j <= n; ++j) {
      Vec dij = discrete_derivative_table(di, n, j);
      Vec dji = discrete_derivative_table(discrete_derivative_table(F, n, j), n, i);
      CHECK((dij - dji).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("normalize") {
  auto a = normalize(DiscreteMeasure(1, Vec::Constant(2, 2.0)));
  CHECK(a[0] == 0.5);
  CHECK(a[1] == 0.5);
  Vec w(4);
  w << 1, 0, 0, 3;
  auto b = normalize(DiscreteMeasure(2, w));
  CHECK(b[0] == 0.25);
  CHECK(b[3] == 0.75);
  CHECK(normalize(b).weights() == b.weights());

  Rng rng(2);
  Vec q = rng.normal_vector(static_cast<Eigen::Index>(num_configs(4)));
  auto g = DiscreteMeasure::gibbs(4, q);
  CHECK(std::abs(g.total_mass() - 1.0) < 1e-12);

  CHECK_THROWS_AS(normalize(DiscreteMeasure(1, Vec::Zero(2))), DomainError);
  CHECK_THROWS_AS(DiscreteMeasure(1, Vec::Constant(2, -1.0)), DomainError);
  CHECK_THROWS_AS(DiscreteMeasure(2, Vec::Ones(3)), DomainError);
}

TEST_CASE("gibbs is stable for large potentials") {
  Vec H(2);
  H << 1000.0, 1001.0;
  auto g = DiscreteMeasure::gibbs(1, H);
  CHECK(g[1] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
}

TEST_CASE("mean and variance") {
  auto u1 = DiscreteMeasure(1, Vec::Constant(2, 0.5));
  auto mv = mean_and_variance(u1, tabulate(1, [](const Vec& x) { return x[0]; }));
  CHECK(mv.mean == 0.0);
  CHECK(mv.variance == 1.0);

  Vec point = Vec::Zero(8);
  point[5] = 1.0;
  Vec phi = Vec::LinSpaced(8, -3.0, 4.0);
  auto pm = mean_and_variance(DiscreteMeasure(3, point), phi);
  CHECK(pm.mean == phi[5]);
  CHECK(pm.variance == 0.0);

  auto u3 = DiscreteMeasure(3, Vec::Constant(8, 0.125));
  auto mag = mean_and_variance(u3, tabulate(3, [](const Vec& x) { return x.sum(); }));
  CHECK(mag.mean == doctest::Approx(0.0));
  CHECK(mag.variance == doctest::Approx(3.0));

  CHECK_THROWS_AS(mean_and_variance(DiscreteMeasure(1, Vec::Ones(2)), Vec::Ones(2)), DomainError);
}

TEST_CASE("tv distance") {
  Vec a(2), b(2);
  a << 1, 0;
  b << 0.25, 0.75;
  CHECK(tv_distance(DiscreteMeasure(1, a), DiscreteMeasure(1, b)) == doctest::Approx(0.75));
}
