#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace hc {

struct Violation {
  std::string where;  // parameters of the failing point
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Outcome of a scanner or Monte Carlo verifier.  Only the first
/// kMaxStoredViolations are kept; violation_count is exact.
struct ScanResult {
  static constexpr std::size_t kMaxStoredViolations = 1000;

  std::string name;
  std::string domain;
  std::int64_t checked = 0;
  std::int64_t skipped = 0;  // points where a hypothesis of the checked statement fails
  std::int64_t violation_count = 0;
  std::vector<Violation> violations;
  std::vector<std::pair<std::string, double>> metrics;

  bool passed() const { return violation_count == 0; }
  void add_violation(std::string where, double lhs, double rhs);
  void metric(std::string key, double value) { metrics.emplace_back(std::move(key), value); }
  double metric_or(const std::string& key, double fallback) const;
  /// Appends the counts and violations of another result; metrics with
  /// the same key keep the larger value.
  void merge(const ScanResult& other);
};

/// xi at the upper end of the quantile cell of a discrete value, from its
/// cdf and survival values (the tail nearer to 0 is inverted).
double xi_at(double cdf, double sf);

// Deterministic scans ------------------------------------------------------

struct TusnadyOptions {
  double constant = 2.0;  // |2u - m| <= constant (1 + sqrt(m) |xi| / 2)
};
/// Binomial quantile coupling bound for every parent m <= m_max and child u.
ScanResult scan_tusnady(int m_max, const TusnadyOptions& opt = {});

struct HyperOptions {
  double alpha = 3.0;
  double beta = 0.41;
  double min_var = 4.5;
  double max_delta_product = 0.125;
};
/// |u - mean - sqrt(var) xi| <= alpha + beta xi^2 over every admissible
/// (S, R1, R2) with S <= n_max and every child u, at the worst xi in u's cell.
ScanResult scan_hypergeometric_lemma(int n_max, const HyperOptions& opt = {});

struct BennettOptions {
  int y_points = 20;
  std::vector<double> probs{0.5, 0.25, 1.0 / 16, 1.0 / 64, 1.0 / 256, 1.0 / 1024};
  double exponent_scale = 1.0;  // > 1 tightens the bound (self-test)
};
/// Exact binomial tails in both directions against exp(-m h(y/m)).
ScanResult check_bennett(int n_max, const BennettOptions& opt = {});

/// E[S^(2k)] of T fair signs by enumerating all 2^T outcomes, against
/// factor (2k)! / (2^k k!) T^k.
ScanResult check_bineg_moments(int t_max, int k_max, double factor = 1.0);

// Monte Carlo verifiers ----------------------------------------------------

enum class DlpFamily { rademacher, predictable, realized_c };

struct DlpConfig {
  DlpFamily family = DlpFamily::rademacher;
  int steps = 64;
  std::int64_t reps = 100000;
  std::vector<double> xs{4.0, 8.0, 12.0, 16.0};
  std::vector<double> ys{16.0, 32.0, 48.0, 64.0};
  double c = 1.0;
  std::uint64_t seed = 1;
  double se_mult = 3.0;
  double exponent_scale = 1.0;  // > 1 tightens the bound (self-test)
  // realized_c only
  std::int64_t n = 256;
  int level_gap = 5;  // Astar = Bstar = N - level_gap
};
/// P(sum d >= x and V^2 <= y for some prefix) <= exp(-x^2 / (2 (y + c x)))
/// + se_mult standard errors at every grid point.  For realized_c the
/// event is also intersected with Theta and {max sigma_i <= c}; the
/// unconditional tail is reported in metrics only.
ScanResult check_dlp_inequality(const DlpConfig& cfg);

double dlp_bound(double x, double y, double c);

struct MaximalConfig {
  std::int64_t n = 256;
  double a = 0.5;
  double b = 0.5;
  std::int64_t reps = 10000;
  std::vector<double> xs_empirical{2.0, 4.0, 8.0, 16.0};
  std::vector<double> xs_gaussian{1.0, 1.5, 2.0, 2.5};
  int gaussian_depth = 7;  // corner grid of the bridge
  std::uint64_t seed = 2;
  double se_mult = 3.0;
  double exponent_scale = 1.0;
};
/// Tail frequencies of sup over [0, a] x [0, b] of |n (H_n - ts)| and |D|
/// against the two maximal inequalities.
ScanResult check_maximal_inequalities(const MaximalConfig& cfg);

/// Exact sup over [0, a] x [0, b] of |#{points in [0,t] x [0,s]} - n t s|
/// for points given as (t, s) pairs.
double empirical_rectangle_sup(const std::vector<std::pair<double, double>>& pts, std::int64_t n, double a,
                               double b);

double maximal_bound_empirical(std::int64_t n, double a, double b, double x);
double maximal_bound_gaussian(double a, double b, double x);

struct MultinomialConfig {
  std::int64_t n = 256;
  int blocks_per_side = 4;
  std::int64_t reps = 200;
  std::uint64_t seed = 3;
  double ks_level = 0.01;
  double expected_scale = 1.0;  // != 1 misstates the total (self-test)
};
/// Pearson statistics of aggregated block counts of m_field against the
/// uniform multinomial; their p-values must pass Kolmogorov-Smirnov.
ScanResult test_multinomial(const MultinomialConfig& cfg);

}  // namespace hc
