#pragma once

#include "til/common.hpp"
#include "til/rng.hpp"
#include "til/spin_space.hpp"
#include "til/tensor.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace til {

// Orthonormal coordinates on symmetric n x n matrices: E_ii, and (E_ij + E_ji)/sqrt2 for i < j.
class SymSpace {
 public:
  explicit SymSpace(int n);

  int n() const { return n_; }
  int dim() const { return m_; }
  Vec coords(const Mat& S) const;
  Mat matrix(const Vec& c) const;
  // n^2 x m, orthonormal columns inside R^{n^2}
  const Mat& embedding() const { return B_; }
  // B^T F B for an n^2 x n^2 operator
  Mat compress(const Mat& flat) const;
  // 2^n x m, row x holds the coordinates of x x^T
  Mat cube_features() const;

 private:
  int n_;
  int m_;
  Mat B_;
};

// exp(-x^2 / (2 delta^2))
double smoothing_kernel(double x, double delta);

// C(H,v,u) = C(H,v) C(H,u~) C(H,v), u~ = C(H,v) u, C(H,v) = P_H - (1 - h(|v_H|)) vbar vbar^T.
// H_basis: orthonormal columns spanning H.
Mat smoothed_projection(const Mat& H_basis, const Vec& v, const Vec& u, double delta);

// -n_eff (C^2)^+ X / (delta - |X|^2); pseudo-inverse cutoff 1e-12
Vec bounded_drift(const Mat& C, const Vec& X, double delta, double n_eff);

struct BoundedTiltOptions {
  int dim = 6;          // ambient dimension of X
  double delta = 1e-3;
  double dt = 0.0;      // 0 -> delta / (100 dim)
  long steps = 10000;   // accepted steps
  int max_halvings = 20;
  double n_eff = 0.0;   // 0 -> dim
};

struct BoundedTiltRun {
  double max_norm_sq = 0.0;
  long accepted = 0;
  long rejected = 0;
  long violations = 0;  // accepted states with |X|^2 >= delta
  bool underflow = false;
  double t = 0.0;
};

// dX = C dW + C^2 v dt with v = bounded_drift, C = smoothed_projection(full space, X + delta xi,
// delta zeta) redrawn every step; Euler with halve-and-redraw on leaving the ball.
BoundedTiltRun run_bounded_tilt(const BoundedTiltOptions& opt, Rng& rng);

struct TslParams {
  double delta = 1e-3;
  double dt = 0.0;       // absolute step; 0 -> dt_rel * trace of the initial operator
  double dt_rel = 1e-3;
  double rank_tol = 1e-8;
  long max_steps = 10'000'000;
  int checkpoints = 10;  // diagnostic snapshots at k * trace / checkpoints
  long log_every = 0;    // trajectory row every k steps, 0 = off
};

// One localization run over the cube. Features g(x) live in R^m; weight s(x) >= 0 multiplies
// the noise term; the reference measure is normalized.
struct LocalizationProblem {
  int n = 0;
  Mat features;   // 2^n x m
  Vec weight;     // 2^n
  Vec log_ref;    // log reference probabilities
  Vec phi;        // test function
  int stop_rank = 2;
};

struct LocalizationState {
  double t = 0.0;
  Vec log_F;          // F_0 = 1
  Mat T;              // m x m operator, T_0 - (1/2) int C^2
  Vec X;              // int C dW + int C^2 v dt
  double mass = 1.0;
  double quad_var_mass = 0.0;
  double quad_var_phi = 0.0;
  double rank_floor = 0.0;
  long steps = 0;

  int rank() const;
};

LocalizationState initial_state(const LocalizationProblem& p, const Mat& T0, double rank_tol);

// unnormalized mu_t = F mu_0 over the cube
Vec current_density(const LocalizationState& s, const LocalizationProblem& p);

struct StepOverrides {
  const Mat* C = nullptr;   // forced driving operator
  const Vec* dW = nullptr;  // forced increment
};

struct StepInfo {
  double dt = 0.0;
  bool landed = false;  // step shortened so an eigenvalue of T reaches 0
  int rank_before = 0;
  int rank_after = 0;
  Mat C;
};

// One Euler-Maruyama step on log F, exact bookkeeping T <- T - C^2 dt / 2.
StepInfo tsl_step(LocalizationState& s, const LocalizationProblem& p, double dt, double delta, Rng& rng,
                  const StepOverrides& ov = {});

// exp(T_t(x) + <g(x), X_t>) times mu_0 / exp(T_0(x)), normalized; equals the normalized F mu_0
Vec closed_form_density(const LocalizationState& s, const LocalizationProblem& p, const Mat& T0);

struct CheckpointRecord {
  double t = 0.0;
  double mass = 0.0;
  double dirichlet = 0.0;  // harmonic form of the unnormalized mu_t
  double mean_phi = 0.0;   // normalized
  double var_phi = 0.0;    // normalized
};

struct TrajectoryRow {
  double t;
  double trace_T;
  int rank_T;
  double mass;
  double norm_X;
  double dirichlet;
  double var_phi;
};

struct RunDiagnostics {
  double tau = 0.0;
  long steps = 0;
  bool stopped_at_start = false;
  double trace0 = 0.0;
  double min_trace_rate = 0.0;     // min over steps of -dTr/dt while rank > stop_rank
  double min_eig_T = 0.0;          // over accepted steps
  double min_eig_T0_minus_T = 0.0;
  double quad_var_mass = 0.0;
  double quad_var_phi = 0.0;
  std::vector<CheckpointRecord> checkpoints;
  std::vector<TrajectoryRow> trajectory;
};

struct FirstStageResult {
  Mat M1, M2;                    // n x n, T_tau = M1 (x) M1 + M2 (x) M2
  std::array<double, 2> lambda{};
  Mat residual;                  // X_tau as an n x n matrix
  double max_asymmetry = 0.0;    // always 0 in symmetric coordinates; kept for the log
  Vec density;                   // unnormalized mu_tau
  double mass = 1.0;
  double inj_upper = 0.0;        // largest eigenvalue of the (PSD) input operator
  RunDiagnostics diag;
};

// T must flatten to a PSD operator (tolerance -1e-10)
FirstStageResult run_first_stage(const SymTensor4& T, const DiscreteMeasure& mu0, const Vec& phi,
                                 const TslParams& params, Rng& rng);
FirstStageResult run_first_stage(const FlattenedOperator& T, const DiscreteMeasure& mu0, const Vec& phi,
                                 const TslParams& params, Rng& rng);

struct VectorStageResult {
  Mat M_tau;
  std::vector<Vec> factors;  // sqrt(lambda_i) e_i for the top stop_rank eigenpairs
  Vec linear;                // int C dB + int C^2 v dt
  Vec density;               // unnormalized F nu
  double mass = 1.0;
  bool degenerate_weight = false;
  RunDiagnostics diag;
};

// generic vector-space run: features x, weight s(x), stop at rank(M) <= stop_rank
VectorStageResult run_vector_stage(const Mat& M0, const Vec& weight, const DiscreteMeasure& nu, const Vec& phi,
                                   int stop_rank, const TslParams& params, Rng& rng);

// nu ~ exp(<x,M'x><x,Mx>) nu_tilde, weight sqrt(<x,M'x>), stop at rank 2
VectorStageResult run_second_stage(const Mat& M_target, const Mat& M_fixed, const DiscreteMeasure& nu_tilde,
                                   const Vec& phi, const TslParams& params, Rng& rng);

// nu ~ exp(<x,Jx>) nu_tilde, unit weight, stop at rank 1; linear holds l
VectorStageResult run_quadratic_stage(const Mat& J, const DiscreteMeasure& nu_tilde, const Vec& phi,
                                      const TslParams& params, Rng& rng);

struct ComponentLedger {
  double max_inner = 0.0;        // max |<u1,u2>|, |<u3,u4>|, |<v1,v2>|, |<v3,v4>|
  double max_uv_norm_sq = 0.0;
  double max_w_norm_sq = 0.0;
  double max_M_op_sq = 0.0;
  double uv_limit = 0.0;         // 2 sqrt(inj)
  double w_limit = 0.0;          // 4 n inj
  bool orthogonal = false;
  bool uv_norms = false;
  bool w_norms = false;
  bool M_norms = false;
  bool tau_first = false;        // tau <= 1.1 trace
  bool all() const { return orthogonal && uv_norms && w_norms && M_norms && tau_first; }
};

struct DecompositionComponent {
  std::uint64_t seed = 0;
  std::array<Vec, 4> u;
  std::array<Vec, 4> v;
  std::array<Vec, 2> w;
  Vec ell;
  double weight = 1.0;       // product of stage masses
  Vec density;               // normalized component measure
  double tau_first = 0.0;
  std::array<double, 4> tau_second{};
  std::array<double, 2> tau_quadratic{};
  long steps = 0;
  bool stopped_at_start = false;
  ComponentLedger ledger;
};

struct DecompositionSetup {
  int n = 0;
  FlattenedOperator op;      // PSD operator driving the first stage
  bool shifted = false;
  double shift = 0.0;
  double inj_upper = 0.0;    // largest eigenvalue of op
  double trace = 0.0;
  DiscreteMeasure target{1, Vec::Constant(2, 0.5)};
};

DecompositionSetup prepare_decomposition(const SymTensor4& T);

DecompositionComponent sample_component(const DecompositionSetup& setup, const Vec& phi, const TslParams& params,
                                        std::uint64_t seed);

struct Decomposition4 {
  DecompositionSetup setup;
  std::vector<DecompositionComponent> components;
};

// seeds derived as split_seed(seed, k); threads only change wall time
Decomposition4 full_decomposition(const SymTensor4& T, const Vec& phi, const TslParams& params, std::uint64_t seed,
                                  int samples, int threads = 1);

// weighted ensemble of normalized densities against a target
struct EnsembleTv {
  double tv = 0.0;
  double sigma = 0.0;  // 1/2 sum_x standard error of the weighted mean at x
};

EnsembleTv ensemble_tv(const std::vector<Vec>& densities, const std::vector<double>& weights, const Vec& target);

}  // namespace til
