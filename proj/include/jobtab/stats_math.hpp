#pragma once

// Small numeric kernels: Student-t quantiles (via the regularized incomplete
// beta function) and nearest-rank quantiles used by the summary tables.

#include <vector>

namespace jobtab {

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

// CDF and upper-tail quantile of Student's t with (possibly fractional)
// degrees of freedom nu > 0. t_quantile(0.95, 9) ~= 1.8331.
double t_cdf(double t, double nu);
double t_quantile(double p, double nu);

// Nearest-rank quantile of a sample: the ceil(p*n)-th smallest value.
// For p=0.5 and even n this is the lower median. Input need not be sorted.
double nearest_rank_quantile(std::vector<double> values, double p);

inline double lower_median(std::vector<double> values) {
  return nearest_rank_quantile(std::move(values), 0.5);
}

// Sample mean/variance helpers for the Monte Carlo harnesses.
double mean_of(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v);  // divisor n-1
double correlation(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace jobtab
