#pragma once

#include <vector>

namespace til {

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
};

Estimate mean_se(const std::vector<double>& x);
// sum(w a) / sum(w) with delta-method standard error
Estimate weighted_mean(const std::vector<double>& a, const std::vector<double>& w);
double median(std::vector<double> x);
// upper tail P(chi2_dof >= stat)
double chi_square_sf(double stat, double dof);
// asymptotic two-sample Kolmogorov-Smirnov p-value
double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b, double* statistic = nullptr);
// least-squares slope of y on x
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace til
