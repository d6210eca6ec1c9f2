#pragma once

#include "til/common.hpp"
#include "til/rng.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace til {

// n^4 storage, independent of the 2^n cap on cube tables
constexpr int kTensorCap = 48;

// Dense symmetric 4-tensor, n^4 entries stored row-major.
class SymTensor4 {
 public:
  explicit SymTensor4(int n = 1);

  // average over all 24 index permutations
  static SymTensor4 symmetrize(int n, const std::vector<double>& raw);
  static SymTensor4 rank1(const Vec& u);
  // beta/n^3 in every slot, i.e. (beta/n^3) (sum x)^4
  static SymTensor4 curie_weiss(int n, double beta);

  int n() const { return n_; }
  double operator()(int i, int j, int k, int l) const { return e_[idx(i, j, k, l)]; }
  const std::vector<double>& entries() const { return e_; }

  double evaluate(const Vec& x) const;
  // T(x,x,x,.)
  Vec contract3(const Vec& x) const;
  // T(x) over the whole cube, index order
  Vec potential_table() const;

  bool has_zero_diagonal(double tol = 0.0) const;
  bool is_symmetric(double tol = 0.0) const;
  SymTensor4 scaled(double c) const;
  SymTensor4 operator+(const SymTensor4& o) const;

  // writes v into every permutation of (i,j,k,l)
  void set_orbit(int i, int j, int k, int l, double v);

  std::size_t idx(int i, int j, int k, int l) const {
    const std::size_t n = static_cast<std::size_t>(n_);
    return ((static_cast<std::size_t>(i) * n + j) * n + k) * n + l;
  }

 private:
  int n_;
  std::vector<double> e_;
};

struct FlattenedOperator {
  int n = 0;
  Mat matrix;  // n^2 x n^2, pair (i,j) -> i*n + j
};

FlattenedOperator flatten(const SymTensor4& T);

// largest |eigenvalue|
double operator_norm(const FlattenedOperator& F);
double operator_norm(const Mat& symmetric);
double min_eigenvalue(const Mat& symmetric);

struct InjectiveNormOptions {
  int starts = 64;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  int max_iter = 20000;
};

struct InjectiveNorm {
  double lower = 0.0;
  double upper = 0.0;
  Vec argmax;
};

InjectiveNorm injective_norm(const SymTensor4& T, const InjectiveNormOptions& opt = {});

// PerOrbit: one N(0, 1/n^3) draw per orbit of distinct indices, copied to all 24 slots.
// Symmetrized: symmetrization of an iid N(0, 1/n^3) array, so orbit variance 1/(24 n^3).
enum class GaussianNormalization { PerOrbit, Symmetrized };

SymTensor4 sample_gaussian_tensor(int n, Rng& rng, int p = 4,
                                  GaussianNormalization norm = GaussianNormalization::PerOrbit);

struct PsdShift {
  FlattenedOperator op;
  double shift = 0.0;
};

// flatten(T) + shift I with shift = inj_upper; potential moves by shift*n^2 on the cube
PsdShift psd_shift(const SymTensor4& T, double inj_upper);
PsdShift psd_shift(const SymTensor4& T);

// (beta / n^(p-1)) |sum x|^p, tabulated over the cube
Vec curie_weiss_potential(int n, double beta, double p);

}  // namespace til
