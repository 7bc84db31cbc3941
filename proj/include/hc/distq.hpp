#pragma once

#include <cstdint>
#include <vector>

namespace hc {

/// Binomial(n, 1/2).
struct BinomialHalf {
  std::int64_t n = 0;
};

/// Hypergeometric law of the number of marked items among n1 draws
/// from a population of n containing n2 marked items.
struct Hypergeometric {
  std::int64_t n = 0;
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
};

/// Standard normal CDF, clamped to [denorm_min, 1 - 2^-53].
double norm_cdf(double x);

/// Inverse of norm_cdf on (0, 1).
double norm_quantile(double p);

/// Bennett's function h(t) = (1 + t) log(1 + t) - t, t > -1.
double bennett_h(double t);

std::int64_t support_min(const BinomialHalf& d);
std::int64_t support_max(const BinomialHalf& d);
std::int64_t support_min(const Hypergeometric& d);
std::int64_t support_max(const Hypergeometric& d);

double log_pmf(const BinomialHalf& d, std::int64_t k);
double log_pmf(const Hypergeometric& d, std::int64_t k);

/// P(X <= floor(u)).
double binom_half_cdf(const BinomialHalf& d, double u);
/// P(X > floor(u)), accumulated from the upper tail.
double binom_half_sf(const BinomialHalf& d, double u);
/// Smallest u with binom_half_cdf(d, u) >= p.
std::int64_t binom_half_quantile(const BinomialHalf& d, double p);
/// Smallest u with binom_half_sf(d, u) <= q: the same map as the quantile
/// at p = 1 - q, resolved in the upper tail.
std::int64_t binom_half_quantile_upper(const BinomialHalf& d, double q);

double hypergeom_cdf(const Hypergeometric& d, double u);
double hypergeom_sf(const Hypergeometric& d, double u);
std::int64_t hypergeom_quantile(const Hypergeometric& d, double p);
std::int64_t hypergeom_quantile_upper(const Hypergeometric& d, double q);

/// Whole-support table: cdf[k - lo] and sf[k - lo] for k in [lo, hi].
/// Entries agree bit-for-bit with the pointwise functions.
struct DiscreteTable {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::vector<double> pmf;
  std::vector<double> cdf;
  std::vector<double> sf;
};

DiscreteTable tabulate(const BinomialHalf& d);
DiscreteTable tabulate(const Hypergeometric& d);

}  // namespace hc
