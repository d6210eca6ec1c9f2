#include "til/glauber.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace til {

namespace {

// exp(b) / (exp(a) + exp(b)) without overflow
double logistic_pick(double a, double b) {
  const double d = b - a;
  if (d >= 0) return 1.0 / (1.0 + std::exp(-d));
  const double e = std::exp(d);
  return e / (1.0 + e);
}

void check_phi(const Vec& phi, std::size_t N) {
  if (phi.size() != static_cast<Eigen::Index>(N)) throw DomainError("test function needs 2^n entries");
}

}  // namespace

std::string to_string(DirichletConvention c) {
  return c == DirichletConvention::Harmonic ? "harmonic" : "kernel";
}

GlauberKernel::GlauberKernel(const Vec& H, int n) : n_(n), H_(H), mu_(DiscreteMeasure::gibbs(n, H)) {
  check_dimension(n, std::min(kDenseKernelCap, max_dimension()));
  const std::size_t N = num_configs(n);
  P_ = Mat::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  for (std::size_t x = 0; x < N; ++x) {
    double off = 0.0;
    for (int i = 0; i < n; ++i) {
      const std::size_t y = x ^ (std::size_t{1} << i);
      const double p = flip_probability(x, i) / n;
      P_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = p;
      off += p;
    }
    P_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) = 1.0 - off;
  }
}

double GlauberKernel::flip_probability(std::size_t x, int i0) const {
  const std::size_t y = x ^ (std::size_t{1} << i0);
  return logistic_pick(H_[static_cast<Eigen::Index>(x)], H_[static_cast<Eigen::Index>(y)]);
}

GlauberKernel build_kernel(const Vec& H, int n) { return GlauberKernel(H, n); }

double dirichlet_form_unnormalized(const Vec& w, int n, const Vec& phi) {
  const std::size_t N = num_configs(n);
  if (w.size() != static_cast<Eigen::Index>(N)) throw DomainError("measure needs 2^n weights");
  check_phi(phi, N);
  double s = 0.0;
  for (std::size_t x = 0; x < N; ++x)
    for (int i = 0; i < n; ++i) {
      const std::size_t y = x ^ (std::size_t{1} << i);
      const double a = w[static_cast<Eigen::Index>(x)], b = w[static_cast<Eigen::Index>(y)];
      if (a < 0 || b < 0) throw DomainError("dirichlet_form: negative weight");
      if (a + b == 0.0) continue;
      const double d = phi[static_cast<Eigen::Index>(x)] - phi[static_cast<Eigen::Index>(y)];
      s += d * d * a * b / (a + b);
    }
  return s;
}

double dirichlet_form(const DiscreteMeasure& mu, const Vec& phi) {
  if (!mu.is_normalized(1e-10)) throw DomainError("dirichlet_form needs a normalized measure");
  return dirichlet_form_unnormalized(mu.weights(), mu.n(), phi);
}

double kernel_dirichlet_form(const GlauberKernel& K, const Vec& phi) {
  const std::size_t N = num_configs(K.n());
  check_phi(phi, N);
  const Vec& mu = K.stationary().weights();
  const Mat& P = K.transition();
  double s = 0.0;
  for (std::size_t x = 0; x < N; ++x)
    for (int i = 0; i < K.n(); ++i) {
      const auto xi = static_cast<Eigen::Index>(x);
      const auto yi = static_cast<Eigen::Index>(x ^ (std::size_t{1} << i));
      const double d = phi[xi] - phi[yi];
      s += d * d * mu[xi] * K.n() * P(xi, yi);
    }
  return 0.5 * s;
}

double poincare_ratio(const GlauberKernel& K, const Vec& phi, DirichletConvention c) {
  const double var = mean_and_variance(K.stationary(), phi).variance;
  const double e = c == DirichletConvention::Kernel ? kernel_dirichlet_form(K, phi)
                                                    : dirichlet_form(K.stationary(), phi);
  if (e <= 0.0) throw NumericalError("poincare_ratio: zero Dirichlet form");
  return var / e;
}

SpectralReport exact_spectral_gap(const GlauberKernel& K) {
  const int n = K.n();
  const std::size_t N = num_configs(n);
  const Vec& H = K.potential();
  const Mat& P = K.transition();
  // D^{1/2} P D^{-1/2}: off-diagonal sqrt(mu_x mu_y)/(mu_x+mu_y)/n = 1/(2n cosh((H_x-H_y)/2))
  Mat S = Mat::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  for (std::size_t x = 0; x < N; ++x) {
    const auto xi = static_cast<Eigen::Index>(x);
    S(xi, xi) = P(xi, xi);
    for (int i = 0; i < n; ++i) {
      const auto yi = static_cast<Eigen::Index>(x ^ (std::size_t{1} << i));
      S(xi, yi) = 1.0 / (2.0 * n * std::cosh(0.5 * (H[xi] - H[yi])));
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  if (es.info() != Eigen::Success) throw NumericalError("exact_spectral_gap: eigensolver failed");

  SpectralReport r;
  r.eigenvalues = es.eigenvalues().reverse();
  if (N == 1) throw NumericalError("exact_spectral_gap: single-state chain");
  r.gap = 1.0 - r.eigenvalues[1];
  if (r.gap <= 1e-14) throw NumericalError("exact_spectral_gap: non-ergodic kernel (gap <= 1e-14)");
  r.generator_gap = n * r.gap;
  r.poincare_constant = 1.0 / r.generator_gap;
  r.poincare_harmonic = 0.5 * r.poincare_constant;

  const Vec psi = es.eigenvectors().col(static_cast<Eigen::Index>(N) - 2);
  const Vec& mu = K.stationary().weights();
  Vec phi = psi.array() / mu.array().sqrt();
  r.variational_poincare = poincare_ratio(K, phi, DirichletConvention::Kernel);
  return r;
}

std::uint64_t glauber_update(int n, const PotentialFn& H, std::uint64_t x, Rng& rng) {
  const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
  const std::uint64_t mask = std::uint64_t{1} << i;
  const std::uint64_t up = x | mask, down = x & ~mask;
  const double p_up = logistic_pick(H(down), H(up));
  return rng.uniform() < p_up ? up : down;
}

Trajectory sample_trajectory(int n, const PotentialFn& H, std::uint64_t x0, double t_end, Rng& rng,
                             SampleMode mode) {
  check_dimension(n, 62);
  if (!(t_end > 0.0)) throw DomainError("sample_trajectory: t_end must be > 0");
  Trajectory tr;
  tr.n = n;
  tr.times.push_back(0.0);
  tr.states.push_back(x0);
  std::uint64_t x = x0;
  if (mode == SampleMode::Discrete) {
    const long steps = static_cast<long>(std::floor(t_end));
    for (long s = 1; s <= steps; ++s) {
      x = glauber_update(n, H, x, rng);
      tr.times.push_back(static_cast<double>(s));
      tr.states.push_back(x);
    }
  } else {
    std::exponential_distribution<double> clock(static_cast<double>(n));
    double t = clock(rng.engine);
    while (t <= t_end) {
      x = glauber_update(n, H, x, rng);
      tr.times.push_back(t);
      tr.states.push_back(x);
      t += clock(rng.engine);
    }
  }
  return tr;
}

long tv_mixing_time(const GlauberKernel& K, double eps, long max_steps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("tv_mixing_time: eps must lie in (0,1)");
  const Mat& P = K.transition();
  const Eigen::RowVectorXd mu = K.stationary().weights().transpose();
  Mat Pt = P;
  for (long t = 1; t <= max_steps; ++t) {
    double worst = 0.0;
    for (Eigen::Index x = 0; x < Pt.rows(); ++x)
      worst = std::max(worst, 0.5 * (Pt.row(x) - mu).cwiseAbs().sum());
    if (worst <= eps) return t;
    Pt = Pt * P;
  }
  throw NumericalError("tv_mixing_time: not mixed within max_steps");
}

long mixing_time_bound(const GlauberKernel& K, const SpectralReport& r, double eps) {
  const double min_mu = K.stationary().weights().minCoeff();
  const double v = K.n() / r.generator_gap * (std::log(1.0 / min_mu) + std::log(1.0 / (2.0 * eps)));
  return static_cast<long>(std::ceil(v));
}

ConcavityCheck dirichlet_concavity_check(const std::vector<DiscreteMeasure>& components,
                                         const std::vector<double>& weights, const Vec& phi) {
  if (components.empty() || components.size() != weights.size())
    throw DomainError("concavity check: components and weights must match and be nonempty");
  const int n = components.front().n();
  double wsum = 0.0;
  for (double w : weights) {
    if (w < 0) throw DomainError("concavity check: negative weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12) throw DomainError("concavity check: weights must sum to 1");
  Vec mix = Vec::Zero(components.front().weights().size());
  ConcavityCheck c;
  for (std::size_t k = 0; k < components.size(); ++k) {
    if (components[k].n() != n) throw DomainError("concavity check: dimension mismatch");
    c.lhs += weights[k] * dirichlet_form(components[k], phi);
    mix += weights[k] * components[k].weights();
  }
  c.rhs = dirichlet_form(DiscreteMeasure(n, mix), phi);
  c.ok = c.lhs <= c.rhs + 1e-12;
  return c;
}

}  // namespace til
