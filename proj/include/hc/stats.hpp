#pragma once

#include <cstddef>
#include <vector>

namespace hc {

/// Regularized lower / upper incomplete gamma P(a, x), Q(a, x).
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

/// Upper tail of the chi-square law with `df` degrees of freedom.
double chi_square_sf(double x, double df);

/// Kolmogorov distance between the sample and U(0, 1).
double ks_statistic_uniform(std::vector<double> sample);
/// Asymptotic Kolmogorov tail with the Stephens small-sample correction.
double ks_pvalue(double d, std::size_t n);

/// Type-7 (linear interpolation) quantile of a sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double q);

struct QuantileEstimate {
  double value = 0.0;
  double se = 0.0;
};

/// Quantile with a standard error from the order statistics at
/// q +- sqrt(q (1 - q) / R).
QuantileEstimate quantile_with_se(const std::vector<double>& sorted, double q);

/// Chi-square goodness of fit; bins with expected count below
/// `min_expected` are pooled from the tails inward.
struct ChiSquareResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};
ChiSquareResult chi_square_test(const std::vector<double>& observed, const std::vector<double>& expected,
                                double min_expected = 5.0);

}  // namespace hc
