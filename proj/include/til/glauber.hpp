#pragma once

#include "til/common.hpp"
#include "til/rng.hpp"
#include "til/spin_space.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace til {

// Harmonic: sum over ordered flip pairs of (f(x)-f(y))^2 mu(x)mu(y)/(mu(x)+mu(y)).
// Kernel: (1/2) sum_{x,y} (f(x)-f(y))^2 mu(x) n P(x,y), i.e. the continuous-time chain
// with site clock rate 1 per coordinate. Kernel = Harmonic / 2 for heat-bath updates.
enum class DirichletConvention { Harmonic, Kernel };
std::string to_string(DirichletConvention c);

class GlauberKernel {
 public:
  GlauberKernel(const Vec& H, int n);

  int n() const { return n_; }
  const Vec& potential() const { return H_; }
  const DiscreteMeasure& stationary() const { return mu_; }
  const Mat& transition() const { return P_; }
  // probability that coordinate i (0-based) flips from configuration x, before the 1/n site choice
  double flip_probability(std::size_t x, int i0) const;

 private:
  int n_;
  Vec H_;
  DiscreteMeasure mu_;
  Mat P_;
};

constexpr int kDenseKernelCap = 12;

GlauberKernel build_kernel(const Vec& H, int n);

// Harmonic form. mu must be normalized; pairs with mu(x)+mu(y) = 0 contribute 0.
double dirichlet_form(const DiscreteMeasure& mu, const Vec& phi);
// Same sum without the normalization requirement (scales linearly with mass).
double dirichlet_form_unnormalized(const Vec& weights, int n, const Vec& phi);
double kernel_dirichlet_form(const GlauberKernel& K, const Vec& phi);

struct SpectralReport {
  double gap = 0.0;                   // 1 - lambda_2 of the discrete kernel, in [0, 2]
  double generator_gap = 0.0;         // n * gap, gap of the rate-n continuous chain
  double poincare_constant = 0.0;     // 1 / generator_gap (kernel convention)
  double variational_poincare = 0.0;  // Var/E_kernel at the lambda_2 eigenfunction
  double poincare_harmonic = 0.0;     // same constant under the harmonic convention
  Vec eigenvalues;                    // full spectrum of P, descending
  DirichletConvention convention = DirichletConvention::Kernel;
};

SpectralReport exact_spectral_gap(const GlauberKernel& K);

// Var_mu(phi) / E(phi) under the given convention (mu = K's stationary law)
double poincare_ratio(const GlauberKernel& K, const Vec& phi, DirichletConvention c);

using PotentialFn = std::function<double(std::uint64_t)>;

enum class SampleMode { Continuous, Discrete };

struct Trajectory {
  int n = 0;
  std::vector<double> times;           // update times (continuous) or step numbers (discrete)
  std::vector<std::uint64_t> states;   // state after each update; states[0] is the start
};

// one heat-bath update at a uniform site
std::uint64_t glauber_update(int n, const PotentialFn& H, std::uint64_t x, Rng& rng);

// Continuous mode: Poisson(n) clock up to t_end. Discrete mode: floor(t_end) updates.
Trajectory sample_trajectory(int n, const PotentialFn& H, std::uint64_t x0, double t_end, Rng& rng,
                             SampleMode mode);

// smallest t with max_x TV(P^t(x,.), mu) <= eps
long tv_mixing_time(const GlauberKernel& K, double eps, long max_steps = 1000000);

// ceil(n / generator_gap * (log(1/min mu) + log(1/(2 eps))))
long mixing_time_bound(const GlauberKernel& K, const SpectralReport& r, double eps);

struct ConcavityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

ConcavityCheck dirichlet_concavity_check(const std::vector<DiscreteMeasure>& components,
                                         const std::vector<double>& weights, const Vec& phi);

}  // namespace til
