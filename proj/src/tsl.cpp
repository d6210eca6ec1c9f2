#include "til/tsl.hpp"
#include "til/glauber.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace til {

namespace {

using Solver = Eigen::SelfAdjointEigenSolver<Mat>;

constexpr int kFirstStageCap = 6;

double log_sum_exp(const Vec& a) {
  const double m = a.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((a.array() - m).exp().sum());
}

Vec normalized_log(const Vec& a) { return (a.array() - log_sum_exp(a)).matrix(); }

Vec quad_table(const Mat& S, const Mat& A) { return (S * A).cwiseProduct(S).rowwise().sum(); }

Mat single_projection(const Mat& P, const Mat& Hb, const Vec& v, double delta) {
  const Vec vH = Hb * (Hb.transpose() * v);
  const double r = vH.norm();
  if (r == 0.0) return P;
  const Vec vb = vH / r;
  return P - (1.0 - smoothing_kernel(r, delta)) * vb * vb.transpose();
}

}  // namespace

// ---------------------------------------------------------------- SymSpace

SymSpace::SymSpace(int n) : n_(n), m_(n * (n + 1) / 2), B_(Mat::Zero(n * n, n * (n + 1) / 2)) {
  check_dimension(n);
  int a = 0;
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j, ++a) {
      if (i == j) {
        B_(i * n + i, a) = 1.0;
      } else {
        B_(i * n + j, a) = r;
        B_(j * n + i, a) = r;
      }
    }
}

Vec SymSpace::coords(const Mat& S) const {
  if (S.rows() != n_ || S.cols() != n_) throw DomainError("SymSpace::coords: expected n x n");
  Vec flat(n_ * n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) flat[i * n_ + j] = S(i, j);
  return B_.transpose() * flat;
}

Mat SymSpace::matrix(const Vec& c) const {
  if (c.size() != m_) throw DomainError("SymSpace::matrix: expected dim() coordinates");
  const Vec flat = B_ * c;
  Mat S(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) S(i, j) = flat[i * n_ + j];
  return S;
}

Mat SymSpace::compress(const Mat& flat) const {
  if (flat.rows() != n_ * n_ || flat.cols() != n_ * n_) throw DomainError("SymSpace::compress: expected n^2 x n^2");
  Mat A = B_.transpose() * flat * B_;
  return 0.5 * (A + A.transpose());
}

Mat SymSpace::cube_features() const {
  const Mat S = spin_matrix(n_);
  Mat G(S.rows(), m_);
  for (Eigen::Index x = 0; x < S.rows(); ++x) {
    const Vec s = S.row(x).transpose();
    G.row(x) = coords(s * s.transpose()).transpose();
  }
  return G;
}

// ---------------------------------------------------------------- projections and drift

double smoothing_kernel(double x, double delta) {
  if (!(delta > 0.0)) throw DomainError("smoothing_kernel: delta must be > 0");
  return std::exp(-x * x / (2.0 * delta * delta));
}

Mat smoothed_projection(const Mat& Hb, const Vec& v, const Vec& u, double delta) {
  if (!(delta > 0.0)) throw DomainError("smoothed_projection: delta must be > 0");
  if (v.size() != Hb.rows() || u.size() != Hb.rows()) throw DomainError("smoothed_projection: dimension mismatch");
  if (Hb.cols() > 0) {
    const Mat gram = Hb.transpose() * Hb;
    if ((gram - Mat::Identity(Hb.cols(), Hb.cols())).cwiseAbs().maxCoeff() > 1e-10)
      throw DomainError("smoothed_projection: basis is not orthonormal");
  }
  const Mat P = Hb * Hb.transpose();
  const Mat Cv = single_projection(P, Hb, v, delta);
  const Vec ut = Cv * u;
  const Mat Cu = single_projection(P, Hb, ut, delta);
  Mat C = Cv * Cu * Cv;
  return 0.5 * (C + C.transpose());
}

Vec bounded_drift(const Mat& C, const Vec& X, double delta, double n_eff) {
  const double y = X.squaredNorm();
  if (!(y < delta)) throw DomainError("bounded_drift: X outside the delta-ball");
  if (y == 0.0) return Vec::Zero(X.size());
  Solver es(C * C);
  const Vec& lam = es.eigenvalues();
  const Mat& V = es.eigenvectors();
  Vec coeff = V.transpose() * X;
  for (Eigen::Index k = 0; k < lam.size(); ++k) coeff[k] = lam[k] > 1e-12 ? coeff[k] / lam[k] : 0.0;
  return -n_eff / (delta - y) * (V * coeff);
}

BoundedTiltRun run_bounded_tilt(const BoundedTiltOptions& opt, Rng& rng) {
  if (opt.dim < 1 || !(opt.delta > 0.0)) throw DomainError("run_bounded_tilt: bad options");
  const int d = opt.dim;
  const double dt0 = opt.dt > 0.0 ? opt.dt : opt.delta / (100.0 * d);
  const double n_eff = opt.n_eff > 0.0 ? opt.n_eff : static_cast<double>(d);
  const Mat I = Mat::Identity(d, d);
  BoundedTiltRun run;
  Vec X = Vec::Zero(d);
  while (run.accepted < opt.steps) {
    const Mat C = smoothed_projection(I, X + opt.delta * rng.normal_vector(d), opt.delta * rng.normal_vector(d),
                                      opt.delta);
    const Vec drift = C * C * bounded_drift(C, X, opt.delta, n_eff);
    double h = dt0;
    bool ok = false;
    for (int k = 0; k <= opt.max_halvings; ++k, h *= 0.5) {
      Vec Xn = X + std::sqrt(h) * (C * rng.normal_vector(d)) + h * drift;
      if (Xn.squaredNorm() < opt.delta) {
        X = std::move(Xn);
        ok = true;
        break;
      }
      ++run.rejected;
    }
    if (!ok) {
      run.underflow = true;
      break;
    }
    ++run.accepted;
    run.t += h;
    const double y = X.squaredNorm();
    run.max_norm_sq = std::max(run.max_norm_sq, y);
    if (y >= opt.delta) ++run.violations;
  }
  return run;
}

// ---------------------------------------------------------------- engine

int LocalizationState::rank() const {
  if (T.size() == 0) return 0;
  Solver es(T, Eigen::EigenvaluesOnly);
  return static_cast<int>((es.eigenvalues().array() > rank_floor).count());
}

LocalizationState initial_state(const LocalizationProblem& p, const Mat& T0, double rank_tol) {
  const auto m = p.features.cols();
  if (T0.rows() != m || T0.cols() != m) throw DomainError("initial_state: operator does not match features");
  LocalizationState s;
  s.log_F = Vec::Zero(p.features.rows());
  s.T = T0;
  s.X = Vec::Zero(m);
  s.mass = std::exp(log_sum_exp(p.log_ref));
  double top = 0.0;
  if (m > 0) top = Solver(T0, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  s.rank_floor = rank_tol * std::max(top, 0.0);
  return s;
}

Vec current_density(const LocalizationState& s, const LocalizationProblem& p) {
  return (s.log_F + p.log_ref).array().exp().matrix();
}

StepInfo tsl_step(LocalizationState& s, const LocalizationProblem& p, double dt, double delta, Rng& rng,
                  const StepOverrides& ov) {
  if (!(dt > 0.0)) throw DomainError("tsl_step: dt must be > 0");
  const auto m = p.features.cols();
  StepInfo info;
  Solver es(s.T);
  const Vec& lam = es.eigenvalues();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < lam.size(); ++k)
    if (lam[k] > s.rank_floor) keep.push_back(k);
  info.rank_before = static_cast<int>(keep.size());
  if (info.rank_before <= p.stop_rank) throw DomainError("tsl_step: process already stopped");
  Mat Hb(m, static_cast<Eigen::Index>(keep.size()));
  Vec lamH(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    Hb.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]);
    lamH[static_cast<Eigen::Index>(c)] = lam[keep[c]];
  }

  // current law, barycenter of the weighted features, constraint directions
  const Vec logw = s.log_F + p.log_ref;
  const double lz = log_sum_exp(logw);
  const Vec pi = (logw.array() - lz).exp().matrix();
  const double mass = std::exp(lz);
  const Vec ps = pi.cwiseProduct(p.weight);
  const double sbar = ps.sum();
  if (!(sbar > 0.0)) throw NumericalError("tsl_step: weight vanishes on the support");
  const Vec v = p.features.transpose() * ps / sbar;
  const Mat Dv = p.features.rowwise() - v.transpose();
  const Vec Phi = mass * (Dv.transpose() * ps.cwiseProduct(p.phi));
  const Vec J = mass * (Dv.transpose() * ps);

  info.C = ov.C ? *ov.C : smoothed_projection(Hb, Phi, J, delta);
  const Mat C2 = info.C * info.C;

  // shorten the step so the smallest surviving direction lands exactly on zero
  const Vec isq = lamH.array().rsqrt().matrix();
  const Mat K = isq.asDiagonal() * (Hb.transpose() * C2 * Hb) * isq.asDiagonal();
  const double kappa = K.size() ? Solver(0.5 * (K + K.transpose()), Eigen::EigenvaluesOnly).eigenvalues().maxCoeff() : 0.0;
  if (kappa > 0.0 && dt >= 2.0 / kappa) {
    dt = 2.0 / kappa;
    info.landed = true;
  }
  info.dt = dt;

  const Vec dW = ov.dW ? *ov.dW : Vec(std::sqrt(dt) * rng.normal_vector(m));
  if (dW.size() != m) throw DomainError("tsl_step: increment dimension mismatch");
  const Vec CdW = info.C * dW;
  const Mat A = Dv * info.C;
  s.log_F += p.weight.cwiseProduct(Dv * CdW) -
             0.5 * dt * p.weight.cwiseProduct(p.weight).cwiseProduct(A.cwiseProduct(A).rowwise().sum());
  s.X += CdW + dt * (C2 * v);
  s.T -= 0.5 * dt * C2;
  s.T = 0.5 * (s.T + s.T.transpose());
  s.quad_var_mass += (info.C * J).squaredNorm() * dt;
  s.quad_var_phi += (info.C * Phi).squaredNorm() * dt;
  s.mass = std::exp(log_sum_exp(s.log_F + p.log_ref));
  s.t += dt;
  ++s.steps;
  info.rank_after = s.rank();
  return info;
}

Vec closed_form_density(const LocalizationState& s, const LocalizationProblem& p, const Mat& T0) {
  const Vec lt = quad_table(p.features, s.T) - quad_table(p.features, T0) + p.features * s.X + p.log_ref;
  return (lt.array() - log_sum_exp(lt)).exp().matrix();
}

namespace {

CheckpointRecord snapshot(const LocalizationState& s, const LocalizationProblem& p) {
  CheckpointRecord r;
  r.t = s.t;
  const Vec w = current_density(s, p);
  r.mass = w.sum();
  r.dirichlet = dirichlet_form_unnormalized(w, p.n, p.phi);
  const Vec pi = w / r.mass;
  r.mean_phi = pi.dot(p.phi);
  r.var_phi = std::max(0.0, pi.dot((p.phi.array() - r.mean_phi).square().matrix()));
  return r;
}

LocalizationState run_engine(const LocalizationProblem& p, const Mat& T0, const TslParams& params, Rng& rng,
                             RunDiagnostics& diag) {
  if (!(params.delta > 0.0)) throw DomainError("delta must be > 0");
  LocalizationState s = initial_state(p, T0, params.rank_tol);
  diag = RunDiagnostics{};
  diag.trace0 = T0.trace();
  diag.min_trace_rate = std::numeric_limits<double>::infinity();
  const double dt = params.dt > 0.0 ? params.dt : params.dt_rel * std::max(diag.trace0, 0.0);

  std::vector<double> cps;
  if (params.checkpoints > 0 && diag.trace0 > 0.0)
    for (int k = 1; k <= params.checkpoints; ++k) cps.push_back(diag.trace0 * k / params.checkpoints);
  std::size_t next_cp = 0;
  diag.checkpoints.push_back(snapshot(s, p));

  auto log_row = [&](int rank) {
    const CheckpointRecord c = snapshot(s, p);
    diag.trajectory.push_back({s.t, s.T.trace(), rank, c.mass, s.X.norm(), c.dirichlet, c.var_phi});
  };

  int rank = s.rank();
  diag.stopped_at_start = rank <= p.stop_rank;
  if (params.log_every > 0) log_row(rank);
  if (!diag.stopped_at_start && !(dt > 0.0)) throw DomainError("step size must be > 0");
  while (rank > p.stop_rank) {
    if (s.steps >= params.max_steps) throw NumericalError("localization exceeded the step budget");
    double h = dt;
    bool at_cp = false;
    if (next_cp < cps.size() && s.t + h >= cps[next_cp]) {
      h = cps[next_cp] - s.t;
      at_cp = true;
    }
    if (h <= 0.0) {  // checkpoint already reached through rounding
      diag.checkpoints.push_back(snapshot(s, p));
      ++next_cp;
      continue;
    }
    const double tr_before = s.T.trace();
    const StepInfo info = tsl_step(s, p, h, params.delta, rng);
    diag.min_trace_rate = std::min(diag.min_trace_rate, (tr_before - s.T.trace()) / info.dt);
    const Solver e1(s.T, Eigen::EigenvaluesOnly);
    const Solver e2(T0 - s.T, Eigen::EigenvaluesOnly);
    diag.min_eig_T = std::min(diag.min_eig_T, e1.eigenvalues().minCoeff());
    diag.min_eig_T0_minus_T = std::min(diag.min_eig_T0_minus_T, e2.eigenvalues().minCoeff());
    rank = info.rank_after;
    if (at_cp && !info.landed) {
      diag.checkpoints.push_back(snapshot(s, p));
      ++next_cp;
    }
    if (params.log_every > 0 && (s.steps % params.log_every == 0 || rank <= p.stop_rank)) log_row(rank);
  }
  // the stopped process is frozen: remaining snapshots repeat the final state
  const CheckpointRecord last = snapshot(s, p);
  for (; next_cp < cps.size(); ++next_cp) {
    diag.checkpoints.push_back(last);
    diag.checkpoints.back().t = cps[next_cp];
  }
  if (!std::isfinite(diag.min_trace_rate)) diag.min_trace_rate = 0.0;
  diag.tau = s.t;
  diag.steps = s.steps;
  diag.quad_var_mass = s.quad_var_mass;
  diag.quad_var_phi = s.quad_var_phi;
  return s;
}

Vec log_of(const DiscreteMeasure& mu) {
  const Vec& w = mu.weights();
  if (w.minCoeff() <= 0.0) throw DomainError("reference measure must have full support");
  return normalized_log(w.array().log().matrix());
}

void check_phi(const Vec& phi, const DiscreteMeasure& mu) {
  if (phi.size() != mu.weights().size()) throw DomainError("test function needs 2^n entries");
}

}  // namespace

// ---------------------------------------------------------------- stages

FirstStageResult run_first_stage(const FlattenedOperator& T, const DiscreteMeasure& mu0, const Vec& phi,
                                 const TslParams& params, Rng& rng) {
  const int n = T.n;
  check_dimension(n, std::min(kFirstStageCap, max_dimension()));
  if (mu0.n() != n) throw DomainError("run_first_stage: measure dimension mismatch");
  check_phi(phi, mu0);
  const Solver full(T.matrix, Eigen::EigenvaluesOnly);
  if (full.eigenvalues().minCoeff() < -1e-10) throw DomainError("run_first_stage: operator is not PSD");

  const SymSpace S(n);
  LocalizationProblem p;
  p.n = n;
  p.features = S.cube_features();
  p.weight = Vec::Ones(p.features.rows());
  p.log_ref = log_of(mu0);
  p.phi = phi;
  p.stop_rank = 2;
  const Mat T0 = S.compress(T.matrix);

  FirstStageResult r;
  r.inj_upper = operator_norm(T.matrix);
  const LocalizationState s = run_engine(p, T0, params, rng, r.diag);

  const Solver es(s.T);
  const auto m = es.eigenvalues().size();
  std::array<Mat, 2> Ms{Mat::Zero(n, n), Mat::Zero(n, n)};
  for (int k = 0; k < 2 && k < m; ++k) {
    r.lambda[k] = std::max(0.0, es.eigenvalues()[m - 1 - k]);
    Ms[k] = std::sqrt(r.lambda[k]) * S.matrix(es.eigenvectors().col(m - 1 - k));
    r.max_asymmetry = std::max(r.max_asymmetry, (Ms[k] - Ms[k].transpose()).cwiseAbs().maxCoeff());
  }
  r.M1 = Ms[0];
  r.M2 = Ms[1];
  r.residual = S.matrix(s.X);
  r.density = current_density(s, p);
  r.mass = r.density.sum();
  return r;
}

FirstStageResult run_first_stage(const SymTensor4& T, const DiscreteMeasure& mu0, const Vec& phi,
                                 const TslParams& params, Rng& rng) {
  return run_first_stage(flatten(T), mu0, phi, params, rng);
}

VectorStageResult run_vector_stage(const Mat& M0, const Vec& weight, const DiscreteMeasure& nu, const Vec& phi,
                                   int stop_rank, const TslParams& params, Rng& rng) {
  const int n = nu.n();
  if (M0.rows() != n || M0.cols() != n) throw DomainError("run_vector_stage: matrix dimension mismatch");
  check_phi(phi, nu);
  if (weight.size() != nu.weights().size() || weight.minCoeff() < 0.0)
    throw DomainError("run_vector_stage: weight must be a nonnegative table");
  const Mat Msym = 0.5 * (M0 + M0.transpose());
  if (Solver(Msym, Eigen::EigenvaluesOnly).eigenvalues().minCoeff() < -1e-10)
    throw DomainError("run_vector_stage: matrix is not PSD");

  VectorStageResult r;
  LocalizationProblem p;
  p.n = n;
  p.features = spin_matrix(n);
  p.weight = weight;
  p.log_ref = log_of(nu);
  p.phi = phi;
  p.stop_rank = stop_rank;

  LocalizationState s;
  if (weight.maxCoeff() <= 1e-300) {
    // no noise reaches the measure; the target's own eigen-factors are returned as is
    r.degenerate_weight = true;
    s = initial_state(p, Msym, params.rank_tol);
    r.diag.stopped_at_start = true;
    r.diag.trace0 = Msym.trace();
  } else {
    s = run_engine(p, Msym, params, rng, r.diag);
  }
  r.M_tau = s.T;
  const Solver es(s.T);
  for (int k = 0; k < stop_rank && k < n; ++k) {
    const double l = std::max(0.0, es.eigenvalues()[n - 1 - k]);
    r.factors.push_back(std::sqrt(l) * es.eigenvectors().col(n - 1 - k));
  }
  while (static_cast<int>(r.factors.size()) < stop_rank) r.factors.push_back(Vec::Zero(n));
  r.linear = s.X;
  r.density = current_density(s, p);
  r.mass = r.density.sum();
  return r;
}

VectorStageResult run_second_stage(const Mat& M_target, const Mat& M_fixed, const DiscreteMeasure& nu_tilde,
                                   const Vec& phi, const TslParams& params, Rng& rng) {
  const int n = nu_tilde.n();
  const Mat S = spin_matrix(n);
  Vec q = quad_table(S, M_fixed);
  const double scale = 1.0 + q.cwiseAbs().maxCoeff();
  if (q.minCoeff() < -1e-12 * scale) throw DomainError("run_second_stage: <x,M'x> is negative somewhere on the cube");
  q = q.cwiseMax(0.0);
  const Vec logw = nu_tilde.weights().array().log().matrix() + q.cwiseProduct(quad_table(S, M_target));
  const DiscreteMeasure nu(n, (logw.array() - log_sum_exp(logw)).exp().matrix());
  return run_vector_stage(M_target, q.cwiseSqrt(), nu, phi, 2, params, rng);
}

VectorStageResult run_quadratic_stage(const Mat& J, const DiscreteMeasure& nu_tilde, const Vec& phi,
                                      const TslParams& params, Rng& rng) {
  const int n = nu_tilde.n();
  const Mat S = spin_matrix(n);
  const Vec logw = nu_tilde.weights().array().log().matrix() + quad_table(S, J);
  const DiscreteMeasure nu(n, (logw.array() - log_sum_exp(logw)).exp().matrix());
  return run_vector_stage(J, Vec::Ones(S.rows()), nu, phi, 1, params, rng);
}

// ---------------------------------------------------------------- full decomposition

DecompositionSetup prepare_decomposition(const SymTensor4& T) {
  DecompositionSetup d;
  d.n = T.n();
  check_dimension(d.n, std::min(kFirstStageCap, max_dimension()));
  const FlattenedOperator F = flatten(T);
  const double lo = min_eigenvalue(F.matrix);
  if (lo >= -1e-10) {
    d.op = F;
  } else {
    const PsdShift s = psd_shift(T, operator_norm(F));
    d.op = s.op;
    d.shifted = true;
    d.shift = s.shift;
  }
  d.inj_upper = std::max(0.0, Solver(d.op.matrix, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff());
  d.trace = SymSpace(d.n).compress(d.op.matrix).trace();
  d.target = DiscreteMeasure::gibbs(d.n, T.potential_table());
  return d;
}

namespace {

DiscreteMeasure tilt_out(const Vec& table, const Vec& log_factor, int n) {
  const Vec lw = table.array().log().matrix() - log_factor;
  return DiscreteMeasure(n, (lw.array() - log_sum_exp(lw)).exp().matrix());
}

}  // namespace

DecompositionComponent sample_component(const DecompositionSetup& setup, const Vec& phi, const TslParams& params,
                                        std::uint64_t seed) {
  const int n = setup.n;
  Rng rng(seed);
  DecompositionComponent c;
  c.seed = seed;

  const FirstStageResult fs = run_first_stage(setup.op, setup.target, phi, params, rng);
  c.tau_first = fs.diag.tau;
  c.steps = fs.diag.steps;
  c.stopped_at_start = fs.diag.stopped_at_start;
  double weight = fs.mass;
  Vec table = fs.density / fs.mass;

  const Mat S = spin_matrix(n);
  const double r = std::sqrt(setup.inj_upper);
  const Mat I = Mat::Identity(n, n);
  const std::array<Mat, 2> Mt{fs.M1 + r * I, fs.M2 + r * I};

  auto absorb = [&](const VectorStageResult& st) {
    weight *= st.mass;
    table = st.density / st.mass;
    c.steps += st.diag.steps;
  };

  for (int a = 0; a < 2; ++a) {
    const Vec qM = quad_table(S, Mt[a]);
    const VectorStageResult s1 =
        run_second_stage(Mt[a], Mt[a], tilt_out(table, qM.cwiseProduct(qM), n), phi, params, rng);
    absorb(s1);
    c.u[2 * a] = s1.factors[0];
    c.u[2 * a + 1] = s1.factors[1];
    c.tau_second[2 * a] = s1.diag.tau;

    const Mat U = s1.factors[0] * s1.factors[0].transpose() + s1.factors[1] * s1.factors[1].transpose();
    const VectorStageResult s2 =
        run_second_stage(Mt[a], U, tilt_out(table, quad_table(S, U).cwiseProduct(qM), n), phi, params, rng);
    absorb(s2);
    c.v[2 * a] = s2.factors[0];
    c.v[2 * a + 1] = s2.factors[1];
    c.tau_second[2 * a + 1] = s2.diag.tau;
  }

  c.ell = Vec::Zero(n);
  const std::array<Mat, 2> Ms{fs.M1, fs.M2};
  for (int a = 0; a < 2; ++a) {
    Mat J = 2.0 * n * r * (r * I - Ms[a]);
    J = 0.5 * (J + J.transpose());
    const VectorStageResult q = run_quadratic_stage(J, tilt_out(table, quad_table(S, J), n), phi, params, rng);
    absorb(q);
    c.w[a] = q.factors[0];
    c.ell += q.linear;
    c.tau_quadratic[a] = q.diag.tau;
  }

  c.weight = weight;
  c.density = table;

  ComponentLedger& L = c.ledger;
  const double inj = setup.inj_upper;
  L.uv_limit = 2.0 * r;
  L.w_limit = 4.0 * n * inj;
  L.max_inner = std::max({std::abs(c.u[0].dot(c.u[1])), std::abs(c.u[2].dot(c.u[3])), std::abs(c.v[0].dot(c.v[1])),
                          std::abs(c.v[2].dot(c.v[3]))});
  for (int k = 0; k < 4; ++k)
    L.max_uv_norm_sq = std::max({L.max_uv_norm_sq, c.u[k].squaredNorm(), c.v[k].squaredNorm()});
  L.max_w_norm_sq = std::max(c.w[0].squaredNorm(), c.w[1].squaredNorm());
  for (const Mat& M : Ms) {
    const double op = operator_norm(M);
    L.max_M_op_sq = std::max(L.max_M_op_sq, op * op);
  }
  L.orthogonal = L.max_inner <= 1e-8;
  L.uv_norms = L.max_uv_norm_sq <= L.uv_limit + 1e-8;
  L.w_norms = L.max_w_norm_sq <= L.w_limit + 1e-8;
  L.M_norms = L.max_M_op_sq <= inj + 1e-8;
  L.tau_first = c.tau_first <= 1.1 * setup.trace + 1e-12;
  return c;
}

Decomposition4 full_decomposition(const SymTensor4& T, const Vec& phi, const TslParams& params, std::uint64_t seed,
                                  int samples, int threads) {
  if (samples < 0) throw DomainError("full_decomposition: negative sample count");
  Decomposition4 out;
  out.setup = prepare_decomposition(T);
  if (phi.size() != static_cast<Eigen::Index>(num_configs(T.n()))) throw DomainError("test function needs 2^n entries");
  out.components.resize(static_cast<std::size_t>(samples));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int k = next++; k < samples; k = next++)
      out.components[static_cast<std::size_t>(k)] =
          sample_component(out.setup, phi, params, split_seed(seed, static_cast<std::uint64_t>(k)));
  };
  const int nt = std::max(1, std::min(threads, samples));
  if (nt == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&, t] {
        try {
          work();
        } catch (...) {
          errs[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  }
  return out;
}

EnsembleTv ensemble_tv(const std::vector<Vec>& densities, const std::vector<double>& weights, const Vec& target) {
  const std::size_t K = densities.size();
  if (K < 2 || weights.size() != K) throw DomainError("ensemble_tv: need >= 2 weighted samples");
  const auto N = target.size();
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  const double wbar = wsum / static_cast<double>(K);
  Vec est = Vec::Zero(N);
  for (std::size_t k = 0; k < K; ++k) est += weights[k] * densities[k];
  est /= wsum;
  Vec ss = Vec::Zero(N);
  for (std::size_t k = 0; k < K; ++k)
    ss += (weights[k] * (densities[k] - est)).cwiseAbs2();
  const Vec se = (ss / (static_cast<double>(K) * (K - 1))).cwiseSqrt() / wbar;
  return {0.5 * (est - target).cwiseAbs().sum(), 0.5 * se.sum()};
}

}  // namespace til
