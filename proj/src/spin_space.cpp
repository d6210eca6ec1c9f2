#include "til/spin_space.hpp"

#include <cmath>

namespace til {

namespace {
void check_coord(int i, int n) {
  if (i < 1 || i > n)
    throw DomainError("coordinate " + std::to_string(i) + " out of range [1," + std::to_string(n) + "]");
}
}  // namespace

int SpinConfig::spin(int i) const {
  check_coord(i, n);
  return ((bits >> (i - 1)) & 1U) ? 1 : -1;
}

SpinConfig SpinConfig::flip(int i) const {
  check_coord(i, n);
  return {bits ^ (std::uint64_t{1} << (i - 1)), n};
}

Vec SpinConfig::vector() const {
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = spin_at(index(), i);
  return x;
}

SpinConfig SpinConfig::from_index(std::size_t index, int n) {
  check_dimension(n, 62);
  if (index >> n) throw DomainError("configuration index out of range");
  return {static_cast<std::uint64_t>(index), n};
}

SpinConfig SpinConfig::from_vector(const Vec& x) {
  const int n = static_cast<int>(x.size());
  check_dimension(n, 62);
  std::uint64_t b = 0;
  for (int i = 0; i < n; ++i) {
    if (x[i] == 1.0)
      b |= std::uint64_t{1} << i;
    else if (x[i] != -1.0)
      throw DomainError("spin vector entries must be +-1");
  }
  return {b, n};
}

std::size_t num_configs(int n) {
  check_dimension(n);
  return std::size_t{1} << n;
}

ConfigRange::ConfigRange(int n) : n_(n), size_(num_configs(n)) {}

ConfigRange enumerate(int n) { return ConfigRange(n); }

Mat spin_matrix(int n) {
  const std::size_t N = num_configs(n);
  Mat S(static_cast<Eigen::Index>(N), n);
  for (std::size_t k = 0; k < N; ++k)
    for (int i = 0; i < n; ++i) S(static_cast<Eigen::Index>(k), i) = spin_at(k, i);
  return S;
}

Vec tabulate(int n, const std::function<double(const Vec&)>& f) {
  const std::size_t N = num_configs(n);
  Vec t(static_cast<Eigen::Index>(N));
  Vec x(n);
  for (std::size_t k = 0; k < N; ++k) {
    for (int i = 0; i < n; ++i) x[i] = spin_at(k, i);
    t[static_cast<Eigen::Index>(k)] = f(x);
  }
  return t;
}

double discrete_derivative(const Vec& table, int n, int i, std::size_t x) {
  check_coord(i, n);
  if (table.size() != static_cast<Eigen::Index>(num_configs(n)))
    throw DomainError("table size does not match 2^n");
  const std::size_t mask = std::size_t{1} << (i - 1);
  return 0.5 * (table[static_cast<Eigen::Index>(x | mask)] - table[static_cast<Eigen::Index>(x & ~mask)]);
}

double discrete_derivative(const std::function<double(const Vec&)>& F, int i, const Vec& x) {
  check_coord(i, static_cast<int>(x.size()));
  Vec xp = x, xm = x;
  xp[i - 1] = 1.0;
  xm[i - 1] = -1.0;
  return 0.5 * (F(xp) - F(xm));
}

Vec discrete_derivative_table(const Vec& table, int n, int i) {
  Vec d(table.size());
  for (std::size_t k = 0; k < static_cast<std::size_t>(table.size()); ++k)
    d[static_cast<Eigen::Index>(k)] = discrete_derivative(table, n, i, k);
  return d;
}

DiscreteMeasure::DiscreteMeasure(int n, Vec weights) : n_(n), w_(std::move(weights)) {
  if (w_.size() != static_cast<Eigen::Index>(num_configs(n)))
    throw DomainError("measure needs 2^n weights");
  for (Eigen::Index k = 0; k < w_.size(); ++k)
    if (!(w_[k] >= 0.0) || !std::isfinite(w_[k])) throw DomainError("measure weights must be finite and >= 0");
}

DiscreteMeasure DiscreteMeasure::gibbs(int n, const Vec& H) {
  if (H.size() != static_cast<Eigen::Index>(num_configs(n))) throw DomainError("potential needs 2^n entries");
  Vec w = (H.array() - H.maxCoeff()).exp().matrix();
  w /= w.sum();
  return DiscreteMeasure(n, std::move(w));
}

bool DiscreteMeasure::is_normalized(double tol) const { return std::abs(total_mass() - 1.0) <= tol; }

DiscreteMeasure DiscreteMeasure::normalized() const {
  const double m = total_mass();
  if (!(m > 0.0)) throw DomainError("cannot normalize a zero-mass measure");
  return DiscreteMeasure(n_, w_ / m);
}

DiscreteMeasure normalize(const DiscreteMeasure& m) { return m.normalized(); }

MeanVariance mean_and_variance(const DiscreteMeasure& m, const Vec& phi) {
  if (!m.is_normalized(1e-10)) throw DomainError("mean_and_variance needs a normalized measure");
  if (phi.size() != m.weights().size()) throw DomainError("test function size mismatch");
  const double mean = m.weights().dot(phi);
  double var = m.weights().dot((phi.array() - mean).square().matrix());
  return {mean, std::max(var, 0.0)};
}

double tv_distance(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.size() != b.size()) throw DomainError("tv_distance size mismatch");
  return 0.5 * (a.weights() - b.weights()).cwiseAbs().sum();
}

}  // namespace til
