#include "til/stats.hpp"
#include "til/common.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>

namespace til {

Estimate mean_se(const std::vector<double>& x) {
  if (x.size() < 2) throw DomainError("mean_se: need >= 2 samples");
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  const double k = static_cast<double>(x.size());
  return {m, std::sqrt(ss / (k - 1) / k)};
}

Estimate weighted_mean(const std::vector<double>& a, const std::vector<double>& w) {
  if (a.size() != w.size() || a.size() < 2) throw DomainError("weighted_mean: need >= 2 matched samples");
  double sw = 0.0, swa = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sw += w[k];
    swa += w[k] * a[k];
  }
  const double r = swa / sw;
  const double K = static_cast<double>(a.size());
  double ss = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) ss += std::pow(w[k] * (a[k] - r), 2);
  return {r, std::sqrt(ss / (K * (K - 1))) / (sw / K)};
}

double median(std::vector<double> x) {
  if (x.empty()) throw DomainError("median of empty sample");
  std::sort(x.begin(), x.end());
  const std::size_t h = x.size() / 2;
  return x.size() % 2 ? x[h] : 0.5 * (x[h - 1] + x[h]);
}

double chi_square_sf(double stat, double dof) {
  if (!(dof > 0)) throw DomainError("chi_square_sf: dof must be > 0");
  if (stat <= 0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), stat));
}

double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b, double* statistic) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample_pvalue: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == t) ++i;
    while (j < b.size() && b[j] == t) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  if (statistic) *statistic = d;
  const double ne = std::sqrt(na * nb / (na + nb));
  const double lam = (ne + 0.12 + 0.11 / ne) * d;
  if (lam < 1e-3) return 1.0;
  double p = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
    p += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("ols_slope: need >= 2 points");
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  return sxy / sxx;
}

}  // namespace til
