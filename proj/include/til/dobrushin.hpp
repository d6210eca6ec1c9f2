#pragma once

#include "til/common.hpp"
#include "til/tensor.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace til {

// largest singular value
double nonneg_operator_norm(const Mat& A);

struct InfluenceMatrix {
  Mat A;
  double norm() const { return nonneg_operator_norm(A); }
};

struct DerivativeMatrix {
  Mat D;
  double norm() const { return nonneg_operator_norm(D); }
};

constexpr int kExactDobrushinCap = 14;

// A_ij = 1/2 max over x, x' differing only at j of |tanh(d_i H(x)) - tanh(d_i H(x'))|
InfluenceMatrix influence_matrix_exact(const Vec& H, int n);

// D_ij = max_x |d_i d_j F(x)|; the diagonal vanishes identically
DerivativeMatrix derivative_matrix_exact(const Vec& F, int n);

double additive_bound(const std::vector<DerivativeMatrix>& Ds);

double rank1_quadratic_bound(const Vec& u);                 // 2|u|^2
double quartic_product_bound(const Vec& u, const Vec& v);   // 12 n |u|^2 |v|^2
// 40 n max(|u1|^4, |u2|^4, |v1|^4, |v2|^4); needs <u1,u2> = <v1,v2> = 0
double orthogonal_pair_bound(const Vec& u1, const Vec& u2, const Vec& v1, const Vec& v2);
// 2K(2K-1) n^(K-1) prod |u_k|^2
double general_product_bound(const std::vector<Vec>& us);

constexpr double kCertificateConstant = 336.0;
constexpr double kQuarticTerms = 320.0;    // 2 * 160
constexpr double kQuadraticTerms = 16.0;   // 2 * 8
constexpr double kE0Degree4 = 1.794;

// 2 * 336 * E0(4)
constexpr double spin_glass_constant() { return 2.0 * kCertificateConstant * kE0Degree4; }

struct Certificate {
  int n = 0;
  double inj_upper = 0.0;
  double inj_lower = 0.0;
  double threshold_336n = 0.0;   // 336 n inj_upper
  std::optional<double> bound;   // 1 / (1 - threshold_336n)
  std::optional<double> optimistic;  // same with inj_lower; not rigorous
  std::string reason;
  bool shifted = false;          // input was not PSD; certified T + shift I instead
  double shift = 0.0;
};

// inj_upper is the operator norm of the flattening (after a PSD shift when needed)
Certificate tensor_gap_certificate(const SymTensor4& T, const InjectiveNormOptions& opt = {});
Certificate certificate_from_norms(int n, double inj_upper, double inj_lower);

std::uint64_t higher_degree_rank_count(int p);      // 2^(2^p - 1)
std::uint64_t higher_degree_rank_recursion(int p);  // n_{2^p} = 2 n_{2^{p-1}}^2, n_1 = 1

}  // namespace til
