#include "til/tensor.hpp"
#include "til/spin_space.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>

namespace til {

namespace {

constexpr std::array<std::array<int, 4>, 24> kPerms = [] {
  std::array<std::array<int, 4>, 24> out{};
  std::array<int, 4> p{0, 1, 2, 3};
  int k = 0;
  do {
    out[k++] = p;
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}();

}  // namespace

SymTensor4::SymTensor4(int n) : n_(n) {
  check_dimension(n, kTensorCap);
  const std::size_t N = static_cast<std::size_t>(n);
  e_.assign(N * N * N * N, 0.0);
}

SymTensor4 SymTensor4::symmetrize(int n, const std::vector<double>& raw) {
  SymTensor4 T(n);
  if (raw.size() != T.e_.size()) throw DomainError("symmetrize: expected n^4 entries");
  std::array<int, 4> a{};
  for (a[0] = 0; a[0] < n; ++a[0])
    for (a[1] = a[0]; a[1] < n; ++a[1])
      for (a[2] = a[1]; a[2] < n; ++a[2])
        for (a[3] = a[2]; a[3] < n; ++a[3]) {
          double s = 0.0;
          for (const auto& p : kPerms) s += raw[T.idx(a[p[0]], a[p[1]], a[p[2]], a[p[3]])];
          s /= 24.0;
          for (const auto& p : kPerms) T.e_[T.idx(a[p[0]], a[p[1]], a[p[2]], a[p[3]])] = s;
        }
  return T;
}

void SymTensor4::set_orbit(int i, int j, int k, int l, double v) {
  const std::array<int, 4> a{i, j, k, l};
  for (int c : a)
    if (c < 0 || c >= n_) throw DomainError("tensor index out of range");
  for (const auto& p : kPerms) e_[idx(a[p[0]], a[p[1]], a[p[2]], a[p[3]])] = v;
}

SymTensor4 SymTensor4::rank1(const Vec& u) {
  const int n = static_cast<int>(u.size());
  SymTensor4 T(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) T.e_[T.idx(i, j, k, l)] = u[i] * u[j] * u[k] * u[l];
  return T;
}

SymTensor4 SymTensor4::curie_weiss(int n, double beta) {
  SymTensor4 T(n);
  std::fill(T.e_.begin(), T.e_.end(), beta / (static_cast<double>(n) * n * n));
  return T;
}

double SymTensor4::evaluate(const Vec& x) const {
  if (x.size() != n_) throw DomainError("evaluate: dimension mismatch");
  return x.dot(contract3(x));
}

Vec SymTensor4::contract3(const Vec& x) const {
  if (x.size() != n_) throw DomainError("contract3: dimension mismatch");
  const std::size_t n = static_cast<std::size_t>(n_);
  Vec out = Vec::Zero(n_);
  std::size_t p = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double xij = x[i] * x[j];
      for (std::size_t k = 0; k < n; ++k) {
        const double c = xij * x[k];
        const double* row = &e_[p];
        for (std::size_t l = 0; l < n; ++l) out[l] += c * row[l];
        p += n;
      }
    }
  return out;
}

Vec SymTensor4::potential_table() const {
  const Mat F = flatten(*this).matrix;
  const std::size_t N = num_configs(n_);
  Vec t(static_cast<Eigen::Index>(N));
  Vec y(n_ * n_);
  for (std::size_t k = 0; k < N; ++k) {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) y[i * n_ + j] = spin_at(k, i) * spin_at(k, j);
    t[static_cast<Eigen::Index>(k)] = y.dot(F * y);
  }
  return t;
}

bool SymTensor4::has_zero_diagonal(double tol) const {
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        for (int l = 0; l < n_; ++l) {
          const bool distinct = i != j && i != k && i != l && j != k && j != l && k != l;
          if (!distinct && std::abs(e_[idx(i, j, k, l)]) > tol) return false;
        }
  return true;
}

bool SymTensor4::is_symmetric(double tol) const {
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        for (int l = 0; l < n_; ++l) {
          const std::array<int, 4> a{i, j, k, l};
          const double v = e_[idx(i, j, k, l)];
          for (const auto& p : kPerms)
            if (std::abs(e_[idx(a[p[0]], a[p[1]], a[p[2]], a[p[3]])] - v) > tol) return false;
        }
  return true;
}

SymTensor4 SymTensor4::scaled(double c) const {
  SymTensor4 T = *this;
  for (auto& v : T.e_) v *= c;
  return T;
}

SymTensor4 SymTensor4::operator+(const SymTensor4& o) const {
  if (o.n_ != n_) throw DomainError("tensor sum: dimension mismatch");
  SymTensor4 T = *this;
  for (std::size_t k = 0; k < e_.size(); ++k) T.e_[k] += o.e_[k];
  return T;
}

FlattenedOperator flatten(const SymTensor4& T) {
  const int n = T.n();
  const int m = n * n;
  FlattenedOperator F{n, Mat(m, m)};
  // row-major n^4 storage is exactly the (ij),(kl) matrix in row-major order
  F.matrix = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      T.entries().data(), m, m);
  return F;
}

double operator_norm(const Mat& A) {
  if (A.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(A, Eigen::EigenvaluesOnly);
  const Vec& ev = es.eigenvalues();
  return std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
}

double operator_norm(const FlattenedOperator& F) { return operator_norm(F.matrix); }

double min_eigenvalue(const Mat& A) {
  Eigen::SelfAdjointEigenSolver<Mat> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

InjectiveNorm injective_norm(const SymTensor4& T, const InjectiveNormOptions& opt) {
  if (opt.starts < 1) throw DomainError("injective_norm: starts must be >= 1");
  if (!(opt.tol > 0.0)) throw DomainError("injective_norm: tol must be > 0");
  const int n = T.n();
  const Mat F = flatten(T).matrix;
  InjectiveNorm out;
  out.upper = operator_norm(F);
  out.argmax = Vec::Unit(n, 0);
  if (out.upper == 0.0) return out;

  // T(x,x,x,.) through the flattening: w = F (x (x) x), g_l = sum_k w_{kn+l} x_k
  Vec xx(n * n), w(n * n);
  auto contract = [&](const Vec& x) {
    for (int i = 0; i < n; ++i) xx.segment(i * n, n) = x[i] * x;
    w.noalias() = F * xx;
    return Vec(Eigen::Map<const Mat>(w.data(), n, n) * x);
  };

  for (int s = 0; s < opt.starts; ++s) {
    Rng rng(split_seed(opt.seed, static_cast<std::uint64_t>(s)));
    Vec x = rng.normal_vector(n);
    x.normalize();
    // even starts climb T, odd ones climb -T; |T| is the max of both
    const double sign = (s % 2 == 0) ? 1.0 : -1.0;
    Vec g = contract(x);
    double f = sign * x.dot(g);
    double eta = 1.0 / out.upper;

    // projected gradient with backtracking; coarse stop, then Newton, then fine stop
    auto ascend = [&](double stop) {
      for (int it = 0; it < opt.max_iter && eta > 1e-18; ++it) {
        Vec grad = 4.0 * sign * g;
        grad -= grad.dot(x) * x;
        if (grad.norm() < 1e-15) break;
        Vec y = (x + eta * grad).normalized();
        Vec gy = contract(y);
        const double fy = sign * y.dot(gy);
        if (fy > f) {
          const double gain = fy - f;
          x = std::move(y);
          g = std::move(gy);
          f = fy;
          eta *= 2.0;
          if (gain < stop) break;
        } else {
          eta *= 0.5;
        }
      }
    };
    ascend(std::max(opt.tol, 1e-6 * std::abs(f) + 1e-6 * out.upper));

    // Riemannian Newton on the sphere, only while the tangent Hessian is negative definite
    bool newton_ok = true;
    for (int it = 0; it < 50; ++it) {
      contract(x);  // refreshes w for the Hessian
      const Mat W = sign * Eigen::Map<const Mat>(w.data(), n, n);
      const Mat P = Mat::Identity(n, n) - x * x.transpose();
      const Vec rg = 4.0 * sign * (P * g);
      const Mat Hs = P * (12.0 * W - 4.0 * f * Mat::Identity(n, n)) * P;
      Eigen::SelfAdjointEigenSolver<Mat> es(Hs + x * x.transpose());
      // x itself carries eigenvalue 1; every tangent direction must be strictly negative
      if ((es.eigenvalues().array() > -1e-12).count() > 1) {
        newton_ok = false;
        break;
      }
      const Vec xi = -(es.eigenvectors() *
                       (es.eigenvalues().cwiseInverse().asDiagonal() * (es.eigenvectors().transpose() * rg)));
      Vec y = (x + xi).normalized();
      Vec gy = contract(y);
      const double fy = sign * y.dot(gy);
      if (!(fy >= f)) break;
      x = std::move(y);
      g = std::move(gy);
      f = fy;
      if (xi.norm() < 1e-14) break;
    }
    if (!newton_ok) ascend(opt.tol);

    if (std::abs(f) > out.lower) {
      out.lower = std::abs(f);
      out.argmax = x;
    }
  }
  out.lower = std::min(out.lower, out.upper);
  return out;
}

SymTensor4 sample_gaussian_tensor(int n, Rng& rng, int p, GaussianNormalization norm) {
  if (p != 4) throw DomainError("sample_gaussian_tensor: only p = 4 is supported");
  if (n < 4) throw DomainError("sample_gaussian_tensor: need n >= 4 for off-diagonal entries");
  SymTensor4 T(n);
  double sd = 1.0 / std::pow(static_cast<double>(n), 1.5);
  if (norm == GaussianNormalization::Symmetrized) sd /= std::sqrt(24.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          T.set_orbit(i, j, k, l, sd * rng.normal());
        }
  return T;
}

PsdShift psd_shift(const SymTensor4& T, double inj_upper) {
  if (!(inj_upper >= 0.0)) throw DomainError("psd_shift: needs a nonnegative injective upper bound");
  PsdShift s{flatten(T), inj_upper};
  s.op.matrix.diagonal().array() += inj_upper;
  return s;
}

PsdShift psd_shift(const SymTensor4& T) { return psd_shift(T, operator_norm(flatten(T))); }

Vec curie_weiss_potential(int n, double beta, double p) {
  if (!(p > 1.0)) throw DomainError("curie_weiss_potential: p must be > 1");
  if (!(beta >= 0.0)) throw DomainError("curie_weiss_potential: beta must be >= 0");
  const double scale = beta / std::pow(static_cast<double>(n), p - 1.0);
  const std::size_t N = num_configs(n);
  Vec t(static_cast<Eigen::Index>(N));
  for (std::size_t k = 0; k < N; ++k) {
    const int plus = std::popcount(static_cast<std::uint64_t>(k));
    const double s = 2.0 * plus - n;
    t[static_cast<Eigen::Index>(k)] = scale * std::pow(std::abs(s), p);
  }
  return t;
}

}  // namespace til
