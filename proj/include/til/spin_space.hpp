#pragma once

#include "til/common.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iterator>

namespace til {

// Coordinate i (1-based) lives in bit i-1; bit set means spin +1.
struct SpinConfig {
  std::uint64_t bits = 0;
  int n = 1;

  int spin(int i) const;  // 1-based
  SpinConfig flip(int i) const;
  std::size_t index() const { return static_cast<std::size_t>(bits); }
  Vec vector() const;

  static SpinConfig from_index(std::size_t index, int n);
  static SpinConfig from_vector(const Vec& x);

  bool operator==(const SpinConfig&) const = default;
};

// 0-based hot-path helper
inline double spin_at(std::size_t index, int i0) { return ((index >> i0) & 1U) ? 1.0 : -1.0; }

std::size_t num_configs(int n);

class ConfigRange {
 public:
  class iterator {
   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = SpinConfig;
    using difference_type = std::ptrdiff_t;
    using pointer = void;
    using reference = SpinConfig;

    iterator() = default;
    iterator(std::size_t k, int n) : k_(k), n_(n) {}
    SpinConfig operator*() const { return SpinConfig::from_index(k_, n_); }
    iterator& operator++() {
      ++k_;
      return *this;
    }
    iterator operator++(int) {
      auto c = *this;
      ++k_;
      return c;
    }
    bool operator==(const iterator& o) const { return k_ == o.k_; }

   private:
    std::size_t k_ = 0;
    int n_ = 1;
  };

  explicit ConfigRange(int n);
  iterator begin() const { return {0, n_}; }
  iterator end() const { return {size_, n_}; }
  std::size_t size() const { return size_; }

 private:
  int n_;
  std::size_t size_;
};

ConfigRange enumerate(int n);

// 2^n x n matrix of spins, row = configuration index
Mat spin_matrix(int n);

// f evaluated on every configuration (as a +-1 vector), index order
Vec tabulate(int n, const std::function<double(const Vec&)>& f);

// (F(x, x_i=+1) - F(x, x_i=-1)) / 2, with F given as a 2^n table
double discrete_derivative(const Vec& table, int n, int i, std::size_t x);
double discrete_derivative(const std::function<double(const Vec&)>& F, int i, const Vec& x);
Vec discrete_derivative_table(const Vec& table, int n, int i);

class DiscreteMeasure {
 public:
  DiscreteMeasure(int n, Vec weights);

  // exp(H - max H), normalized; stable for large potentials
  static DiscreteMeasure gibbs(int n, const Vec& H);

  int n() const { return n_; }
  const Vec& weights() const { return w_; }
  double operator[](std::size_t k) const { return w_[static_cast<Eigen::Index>(k)]; }
  std::size_t size() const { return static_cast<std::size_t>(w_.size()); }
  double total_mass() const { return w_.sum(); }
  bool is_normalized(double tol = 1e-12) const;
  DiscreteMeasure normalized() const;

 private:
  int n_;
  Vec w_;
};

DiscreteMeasure normalize(const DiscreteMeasure& m);

struct MeanVariance {
  double mean;
  double variance;
};

MeanVariance mean_and_variance(const DiscreteMeasure& m, const Vec& phi);

// both inputs normalized
double tv_distance(const DiscreteMeasure& a, const DiscreteMeasure& b);

}  // namespace til
