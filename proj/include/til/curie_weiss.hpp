#pragma once

#include "til/common.hpp"
#include "til/rng.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace til {

// atanh(x) / (p x^(p-1))
double beta_star_objective(double x, double p);
// minimum of the objective on (0,1), golden section
double beta_star(double p, double tol = 1e-10);

struct Transition {
  double up = 0.0;
  double stay = 0.0;
  double down = 0.0;
};

// exact heat-bath probabilities for S -> S +- 2; stay is the residual
Transition exact_transitions(int n, double p, double beta, int s);
// (1 -+ s~)/4 (1 +- tanh(p beta s~^(p-1))) with s~ = s/n
Transition asymptotic_transitions(int n, double p, double beta, int s);

class MagnetizationChain {
 public:
  MagnetizationChain(int n, double p, double beta);

  int n() const { return n_; }
  double p() const { return p_; }
  double beta() const { return beta_; }
  const Transition& at(int s) const;
  int step(int s, Rng& rng) const;

  // both indexed by (s + n) / 2
  Vec stationary() const;         // detailed balance along the path
  Vec stationary_direct() const;  // binomial(n, (n+s)/2) exp(beta |s|^p / n^(p-1))
  Mat transition_matrix() const;
  // law of S_k started from s0, indexed by (s + n) / 2
  Vec distribution_after(int s0, long k) const;

 private:
  int n_;
  double p_;
  double beta_;
  std::vector<Transition> table_;
};

// largest run of grid points s~ in (0,1) with tanh(beta p s~^(p-1)) - s~ > margin
std::optional<std::pair<double, double>> bias_interval(int n, double p, double beta, double margin = 0.01,
                                                       int grid = 10000);

// ((1-q)/q)^m: chance a walk stepping away from a level with probability q ever gets m below start
double escape_probability_bound(double q, int m);
// fraction of `runs` such walks that reach distance m
double simulate_escape_frequency(double q, int m, long runs, Rng& rng);

struct HittingRecord {
  int n = 0;
  double beta = 0.0;
  double p = 0.0;
  std::uint64_t seed = 0;
  long long steps = 0;  // budget when censored
  bool censored = false;
};

// steps of the chain from s0 until the magnetization changes sign strictly
// (S < 0 for s0 > 0, S > 0 for s0 < 0); stays are counted
HittingRecord hitting_time(const MagnetizationChain& chain, int s0, long long budget, Rng& rng);

// per (n, seed index): start at S = n, seeds split from base_seed
std::vector<HittingRecord> hitting_time_experiment(const std::vector<int>& n_list, double p, double beta, int seeds,
                                                   std::uint64_t base_seed, long long budget = 100'000'000,
                                                   int threads = 1);

struct HittingSummary {
  int n = 0;
  double median = 0.0;  // censored runs count as the budget
  int censored = 0;
  int runs = 0;
};

std::vector<HittingSummary> summarize_hitting(const std::vector<HittingRecord>& rows);

struct LumpingTest {
  double chi2 = 0.0;
  int dof = 0;
  double p_value = 0.0;
};

// full discrete-time Glauber from x = 1 versus the 1-d chain after `steps` updates
LumpingTest lumping_fidelity(int n, double p, double beta, long steps, long samples, Rng& rng);

}  // namespace til
