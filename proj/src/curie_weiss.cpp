#include "til/curie_weiss.hpp"
#include "til/glauber.hpp"
#include "til/stats.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <thread>

namespace til {

namespace {

double energy(double s, int n, double p, double beta) {
  return beta * std::pow(std::abs(s), p) / std::pow(static_cast<double>(n), p - 1.0);
}

void check_params(int n, double p, double beta) {
  if (n < 1) throw DomainError("curie-weiss: n must be >= 1");
  if (!(p > 1.0)) throw DomainError("curie-weiss: p must be > 1");
  if (!(beta >= 0.0)) throw DomainError("curie-weiss: beta must be >= 0");
}

}  // namespace

double beta_star_objective(double x, double p) { return std::atanh(x) / (p * std::pow(x, p - 1.0)); }

double beta_star(double p, double tol) {
  if (!(p > 1.0)) throw DomainError("beta_star: p must be > 1");
  if (!(tol > 0.0)) throw DomainError("beta_star: tol must be > 0");
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 1.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = beta_star_objective(c, p), fd = beta_star_objective(d, p);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = beta_star_objective(c, p);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = beta_star_objective(d, p);
    }
  }
  const double x = 0.5 * (a + b);
  return x > 0.0 ? beta_star_objective(x, p) : beta_star_objective(tol, p);
}

Transition exact_transitions(int n, double p, double beta, int s) {
  check_params(n, p, beta);
  if (s < -n || s > n || ((s + n) % 2) != 0) throw DomainError("exact_transitions: s must lie in {-n, -n+2, ..., n}");
  const double h = energy(s, n, p, beta);
  Transition t;
  const double frac = static_cast<double>(s) / n;
  if (s < n) t.up = 0.5 * (1.0 - frac) * 0.5 * (1.0 + std::tanh(0.5 * (energy(s + 2, n, p, beta) - h)));
  if (s > -n) t.down = 0.5 * (1.0 + frac) * 0.5 * (1.0 + std::tanh(0.5 * (energy(s - 2, n, p, beta) - h)));
  t.stay = 1.0 - t.up - t.down;
  return t;
}

Transition asymptotic_transitions(int n, double p, double beta, int s) {
  check_params(n, p, beta);
  const double x = static_cast<double>(s) / n;
  const double drift = std::tanh(p * beta * std::copysign(std::pow(std::abs(x), p - 1.0), x));
  Transition t;
  t.up = 0.25 * (1.0 - x) * (1.0 + drift);
  t.down = 0.25 * (1.0 + x) * (1.0 - drift);
  t.stay = 1.0 - t.up - t.down;
  return t;
}

MagnetizationChain::MagnetizationChain(int n, double p, double beta) : n_(n), p_(p), beta_(beta) {
  check_params(n, p, beta);
  for (int s = -n; s <= n; s += 2) table_.push_back(exact_transitions(n, p, beta, s));
}

const Transition& MagnetizationChain::at(int s) const {
  if (s < -n_ || s > n_ || ((s + n_) % 2) != 0) throw DomainError("MagnetizationChain: invalid state");
  return table_[static_cast<std::size_t>((s + n_) / 2)];
}

int MagnetizationChain::step(int s, Rng& rng) const {
  const Transition& t = at(s);
  const double u = rng.uniform();
  if (u < t.up) return s + 2;
  if (u < t.up + t.down) return s - 2;
  return s;
}

Vec MagnetizationChain::stationary() const {
  Vec lp(n_ + 1);
  lp[0] = 0.0;
  for (int k = 0; k < n_; ++k) {
    const int s = -n_ + 2 * k;
    lp[k + 1] = lp[k] + std::log(at(s).up) - std::log(at(s + 2).down);
  }
  Vec w = (lp.array() - lp.maxCoeff()).exp().matrix();
  return w / w.sum();
}

Vec MagnetizationChain::stationary_direct() const {
  Vec lp(n_ + 1);
  for (int k = 0; k <= n_; ++k) {
    const int s = -n_ + 2 * k;
    lp[k] = std::lgamma(n_ + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n_ - k + 1.0) + energy(s, n_, p_, beta_);
  }
  Vec w = (lp.array() - lp.maxCoeff()).exp().matrix();
  return w / w.sum();
}

Mat MagnetizationChain::transition_matrix() const {
  Mat P = Mat::Zero(n_ + 1, n_ + 1);
  for (int k = 0; k <= n_; ++k) {
    const Transition& t = table_[static_cast<std::size_t>(k)];
    P(k, k) = t.stay;
    if (k < n_) P(k, k + 1) = t.up;
    if (k > 0) P(k, k - 1) = t.down;
  }
  return P;
}

Vec MagnetizationChain::distribution_after(int s0, long k) const {
  at(s0);
  const Mat P = transition_matrix();
  Eigen::RowVectorXd d = Eigen::RowVectorXd::Zero(n_ + 1);
  d[(s0 + n_) / 2] = 1.0;
  for (long t = 0; t < k; ++t) d = d * P;
  return d.transpose();
}

std::optional<std::pair<double, double>> bias_interval(int n, double p, double beta, double margin, int grid) {
  check_params(std::max(n, 1), p, beta);
  if (grid < 2) throw DomainError("bias_interval: grid must be >= 2");
  std::optional<std::pair<double, double>> best;
  double run_start = -1.0, prev = -1.0;
  auto close_run = [&] {
    if (run_start >= 0.0 && (!best || prev - run_start > best->second - best->first)) best = {run_start, prev};
    run_start = -1.0;
  };
  for (int k = 1; k < grid; ++k) {
    const double x = static_cast<double>(k) / grid;
    if (std::tanh(beta * p * std::pow(x, p - 1.0)) - x > margin) {
      if (run_start < 0.0) run_start = x;
      prev = x;
    } else {
      close_run();
    }
  }
  close_run();
  return best;
}

double escape_probability_bound(double q, int m) {
  if (!(q > 0.5 && q <= 1.0)) throw DomainError("escape_probability_bound: q must lie in (1/2, 1]");
  if (m < 1) throw DomainError("escape_probability_bound: m must be >= 1");
  return std::pow((1.0 - q) / q, m);
}

double simulate_escape_frequency(double q, int m, long runs, Rng& rng) {
  const double r = escape_probability_bound(q, 1);
  // beyond this height a return has probability below 1e-15
  const long cap = r > 0.0 ? static_cast<long>(std::ceil(std::log(1e-15) / std::log(r))) : 1;
  long hits = 0;
  for (long k = 0; k < runs; ++k) {
    long pos = 0;
    while (pos > -m && pos < cap) pos += rng.uniform() < q ? 1 : -1;
    if (pos <= -m) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(runs);
}

HittingRecord hitting_time(const MagnetizationChain& chain, int s0, long long budget, Rng& rng) {
  if (s0 == 0) throw DomainError("hitting_time: start must be nonzero");
  HittingRecord rec;
  rec.n = chain.n();
  rec.beta = chain.beta();
  rec.p = chain.p();
  const int sign = s0 > 0 ? 1 : -1;
  int s = s0;
  long long steps = 0;
  while (sign * s >= 0) {
    const Transition& t = chain.at(s);
    const double move = t.up + t.down;
    if (move <= 0.0) {
      steps = budget + 1;
      break;
    }
    // stays before the next move are geometric
    long long wait = 1;
    if (t.stay > 0.0) {
      const double u = 1.0 - rng.uniform();
      const double g = std::floor(std::log(u) / std::log(t.stay));
      wait += g > 1e18 ? static_cast<long long>(1e18) : static_cast<long long>(g);
    }
    steps += wait;
    if (steps > budget) break;
    s += rng.uniform() * move < t.up ? 2 : -2;
  }
  if (steps > budget) {
    rec.censored = true;
    rec.steps = budget;
  } else {
    rec.steps = steps;
  }
  return rec;
}

std::vector<HittingRecord> hitting_time_experiment(const std::vector<int>& n_list, double p, double beta, int seeds,
                                                   std::uint64_t base_seed, long long budget, int threads) {
  if (seeds < 1) throw DomainError("hitting_time_experiment: seeds must be >= 1");
  std::vector<MagnetizationChain> chains;
  for (int n : n_list) chains.emplace_back(n, p, beta);
  const std::size_t total = n_list.size() * static_cast<std::size_t>(seeds);
  std::vector<HittingRecord> rows(total);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < total; k = next++) {
      const std::size_t a = k / static_cast<std::size_t>(seeds);
      const std::uint64_t sd = split_seed(base_seed, k);
      Rng rng(sd);
      rows[k] = hitting_time(chains[a], n_list[a], budget, rng);
      rows[k].seed = sd;
    }
  };
  const int nt = std::max(1, threads);
  if (nt == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return rows;
}

std::vector<HittingSummary> summarize_hitting(const std::vector<HittingRecord>& rows) {
  std::vector<HittingSummary> out;
  std::vector<int> ns;
  for (const auto& r : rows)
    if (std::find(ns.begin(), ns.end(), r.n) == ns.end()) ns.push_back(r.n);
  for (int n : ns) {
    HittingSummary s;
    s.n = n;
    std::vector<double> v;
    for (const auto& r : rows)
      if (r.n == n) {
        v.push_back(static_cast<double>(r.steps));
        s.censored += r.censored ? 1 : 0;
      }
    s.runs = static_cast<int>(v.size());
    s.median = median(v);
    out.push_back(s);
  }
  return out;
}

LumpingTest lumping_fidelity(int n, double p, double beta, long steps, long samples, Rng& rng) {
  const MagnetizationChain chain(n, p, beta);
  const Vec expect = chain.distribution_after(n, steps);
  const double scale = beta / std::pow(static_cast<double>(n), p - 1.0);
  const PotentialFn H = [&](std::uint64_t x) {
    const double s = 2.0 * std::popcount(x) - n;
    return scale * std::pow(std::abs(s), p);
  };
  std::vector<double> counts(static_cast<std::size_t>(n + 1), 0.0);
  const std::uint64_t all_up = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
  for (long k = 0; k < samples; ++k) {
    std::uint64_t x = all_up;
    for (long t = 0; t < steps; ++t) x = glauber_update(n, H, x, rng);
    counts[static_cast<std::size_t>(std::popcount(x))] += 1.0;
  }
  // pool sparse bins until each expected count is >= 5; a short tail joins the last bin
  std::vector<std::pair<double, double>> bins;
  double obs = 0.0, ex = 0.0;
  for (int k = 0; k <= n; ++k) {
    obs += counts[static_cast<std::size_t>(k)];
    ex += expect[k] * static_cast<double>(samples);
    if (ex >= 5.0) {
      bins.emplace_back(obs, ex);
      obs = ex = 0.0;
    }
  }
  if (ex > 0.0 || obs > 0.0) {
    if (bins.empty())
      bins.emplace_back(obs, ex);
    else {
      bins.back().first += obs;
      bins.back().second += ex;
    }
  }
  LumpingTest out;
  for (const auto& [o, e] : bins)
    if (e > 0.0) out.chi2 += (o - e) * (o - e) / e;
  const int nbins = static_cast<int>(bins.size());
  out.dof = std::max(1, nbins - 1);
  out.p_value = chi_square_sf(out.chi2, out.dof);
  return out;
}

}  // namespace til
