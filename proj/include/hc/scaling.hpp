#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hc/stats.hpp"

namespace hc {

struct ScalingConfig {
  std::vector<std::int64_t> ns{256, 512, 1024, 2048, 4096};
  std::int64_t reps = 200;
  std::vector<double> levels{0.5, 0.9};
  std::uint64_t seed = 1;
};

/// Distribution of the corner sup of |E| over R couplings at one n.
struct ScalingRow {
  std::int64_t n = 0;
  int N = 0;
  std::int64_t reps = 0;
  std::vector<double> levels;
  std::vector<QuantileEstimate> quantiles;  // one per level, nondecreasing
  double mean = 0.0;
  double stderr_mean = 0.0;
};

/// Replication r at size n uses seed derive_seed(derive_seed(seed, n), r).
std::vector<ScalingRow> run_scaling(const ScalingConfig& cfg);

/// Least squares of log q_n on log log n: q_n = c (log n)^p.
struct ExponentFit {
  double level = 0.0;
  std::size_t points = 0;
  bool ok = false;
  std::string note;  // why the fit is unavailable
  double p = 0.0;
  double p_se = 0.0;  // from residuals; 0 with two points
  double log_c = 0.0;
};
ExponentFit fit_exponent(const std::vector<ScalingRow>& rows, std::size_t level_index);

struct RatioPoint {
  std::int64_t n = 0;
  double ratio2 = 0.0;  // q_n / (log n)^2
  double ratio2_se = 0.0;
  double ratio32 = 0.0;  // q_n / (log n)^(3/2)
  double ratio32_se = 0.0;
};
/// Rows with n >= 3 only (log log n must be defined).
std::vector<RatioPoint> ratio_series(const std::vector<ScalingRow>& rows, std::size_t level_index);

/// The three properties checked against the scaling claim.
struct ScalingVerdict {
  double level = 0.0;
  bool nondecreasing = true;        // q_{n'} >= q_n - k se for consecutive n < n'
  bool exponent_in_range = false;   // p_lo <= p <= p_hi
  bool ratio2_nonincreasing = true; // r_{n'} <= r_n + k se
  ExponentFit fit;

  bool holds() const { return nondecreasing && exponent_in_range && ratio2_nonincreasing; }
};
ScalingVerdict scaling_properties(const std::vector<ScalingRow>& rows, std::size_t level_index, double se_mult = 2.0,
                                  double p_lo = 1.0, double p_hi = 2.3);

}  // namespace hc
