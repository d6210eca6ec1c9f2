#include "til/dobrushin.hpp"
#include "til/spin_space.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace til {

double nonneg_operator_norm(const Mat& A) {
  if (A.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(A.transpose() * A, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

InfluenceMatrix influence_matrix_exact(const Vec& H, int n) {
  check_dimension(n, std::min(kExactDobrushinCap, max_dimension()));
  const std::size_t N = num_configs(n);
  if (H.size() != static_cast<Eigen::Index>(N)) throw DomainError("potential needs 2^n entries");
  // conditional mean of x_i given the rest: tanh((H(x_i=+1) - H(x_i=-1)) / 2)
  Mat m(static_cast<Eigen::Index>(N), n);
  for (std::size_t x = 0; x < N; ++x)
    for (int i = 0; i < n; ++i) {
      const std::size_t b = std::size_t{1} << i;
      m(static_cast<Eigen::Index>(x), i) =
          std::tanh(0.5 * (H[static_cast<Eigen::Index>(x | b)] - H[static_cast<Eigen::Index>(x & ~b)]));
    }
  InfluenceMatrix out{Mat::Zero(n, n)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const std::size_t bj = std::size_t{1} << j;
      double best = 0.0;
      for (std::size_t x = 0; x < N; ++x) {
        if (x & bj) continue;
        best = std::max(best, std::abs(m(static_cast<Eigen::Index>(x), i) - m(static_cast<Eigen::Index>(x | bj), i)));
      }
      out.A(i, j) = 0.5 * best;
    }
  return out;
}

DerivativeMatrix derivative_matrix_exact(const Vec& F, int n) {
  check_dimension(n, std::min(kExactDobrushinCap, max_dimension()));
  const std::size_t N = num_configs(n);
  if (F.size() != static_cast<Eigen::Index>(N)) throw DomainError("function table needs 2^n entries");
  DerivativeMatrix out{Mat::Zero(n, n)};
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const std::size_t bi = std::size_t{1} << i, bj = std::size_t{1} << j;
      double best = 0.0;
      for (std::size_t x = 0; x < N; ++x) {
        if (x & (bi | bj)) continue;
        const double v = 0.25 * (F[static_cast<Eigen::Index>(x | bi | bj)] - F[static_cast<Eigen::Index>(x | bi)] -
                                 F[static_cast<Eigen::Index>(x | bj)] + F[static_cast<Eigen::Index>(x)]);
        best = std::max(best, std::abs(v));
      }
      out.D(i, j) = out.D(j, i) = best;
    }
  return out;
}

double additive_bound(const std::vector<DerivativeMatrix>& Ds) {
  double s = 0.0;
  for (const auto& D : Ds) {
    if (!Ds.empty() && D.D.rows() != Ds.front().D.rows()) throw DomainError("additive_bound: dimension mismatch");
    s += D.norm();
  }
  return s;
}

double rank1_quadratic_bound(const Vec& u) { return 2.0 * u.squaredNorm(); }

double quartic_product_bound(const Vec& u, const Vec& v) {
  if (u.size() != v.size()) throw DomainError("quartic_product_bound: dimension mismatch");
  return 12.0 * static_cast<double>(u.size()) * u.squaredNorm() * v.squaredNorm();
}

double orthogonal_pair_bound(const Vec& u1, const Vec& u2, const Vec& v1, const Vec& v2) {
  const auto n = u1.size();
  if (u2.size() != n || v1.size() != n || v2.size() != n) throw DomainError("orthogonal_pair_bound: dimension mismatch");
  if (std::abs(u1.dot(u2)) > 1e-10 || std::abs(v1.dot(v2)) > 1e-10)
    throw DomainError("orthogonal_pair_bound: pairs must be orthogonal");
  const double m = std::max({u1.squaredNorm(), u2.squaredNorm(), v1.squaredNorm(), v2.squaredNorm()});
  return 40.0 * static_cast<double>(n) * m * m;
}

double general_product_bound(const std::vector<Vec>& us) {
  if (us.empty()) throw DomainError("general_product_bound: need K >= 1");
  const double K = static_cast<double>(us.size());
  const double n = static_cast<double>(us.front().size());
  double prod = 1.0;
  for (const auto& u : us) {
    if (u.size() != us.front().size()) throw DomainError("general_product_bound: dimension mismatch");
    prod *= u.squaredNorm();
  }
  return 2.0 * K * (2.0 * K - 1.0) * std::pow(n, K - 1.0) * prod;
}

Certificate certificate_from_norms(int n, double inj_upper, double inj_lower) {
  Certificate c;
  c.n = n;
  c.inj_upper = inj_upper;
  c.inj_lower = inj_lower;
  c.threshold_336n = kCertificateConstant * n * inj_upper;
  if (c.threshold_336n < 1.0)
    c.bound = 1.0 / (1.0 - c.threshold_336n);
  else
    c.reason = "336n*inj >= 1";
  const double opt = kCertificateConstant * n * inj_lower;
  if (opt < 1.0) c.optimistic = 1.0 / (1.0 - opt);
  return c;
}

Certificate tensor_gap_certificate(const SymTensor4& T, const InjectiveNormOptions& opt) {
  const FlattenedOperator F = flatten(T);
  const double lo_eig = min_eigenvalue(F.matrix);
  const InjectiveNorm inj = injective_norm(T, opt);
  Certificate c;
  if (lo_eig >= -1e-10) {
    c = certificate_from_norms(T.n(), inj.upper, inj.lower);
  } else {
    // same Gibbs measure on the cube; (T + s I)(x) = T(x) + s on the unit sphere
    const PsdShift s = psd_shift(T, inj.upper);
    c = certificate_from_norms(T.n(), operator_norm(s.op), std::abs(T.evaluate(inj.argmax) + s.shift));
    c.shifted = true;
    c.shift = s.shift;
  }
  return c;
}

std::uint64_t higher_degree_rank_count(int p) {
  if (p < 0 || p > 6) throw DomainError("higher_degree_rank_count: p must lie in [0, 6]");
  return std::uint64_t{1} << ((1 << p) - 1);
}

std::uint64_t higher_degree_rank_recursion(int p) {
  if (p < 0 || p > 6) throw DomainError("higher_degree_rank_recursion: p must lie in [0, 6]");
  std::uint64_t v = 1;
  for (int k = 1; k <= p; ++k) v = 2 * v * v;
  return v;
}

}  // namespace til
