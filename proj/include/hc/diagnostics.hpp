#pragma once

#include <cstdint>
#include <vector>

#include "hc/coupling.hpp"
#include "hc/dyadic.hpp"

namespace hc {

/// The epsilon of the closeness events.
inline constexpr double kThetaEpsilon = 0.5;

/// Corner values E(t, s) = nH_n(t, s) - nts - sqrt(n) D(t, s) on the
/// (2^N + 1)^2 grid, indexed (l, k) for t = k 2^-N, s = l 2^-N.
struct ErrorSurface {
  Grid<double> values;
  double excess = 0.0;  // n - root_total
  double sup_abs = 0.0;
  Eigen::Index arg_l = 0;
  Eigen::Index arg_k = 0;

  /// Sup of |E| over corners with t <= a and s <= b.
  double restricted_sup(double a, double b) const;
};

ErrorSurface error_surface(const CoupledRealization& r);

/// Streaming sup of |E| without materializing the surface.
struct ErrorSummary {
  double sup_abs = 0.0;
  Eigen::Index arg_l = 0;
  Eigen::Index arg_k = 0;
};
ErrorSummary error_summary(const CoupledRealization& r);

/// How l(i, v) and k(j, u) are chosen.  half_open: the even anchor with
/// m in (k 2^j, (k + 2) 2^j].  centered: the window ((l - 1) 2^i,
/// (l + 1) 2^i] as printed for l(i, v); kept to show it breaks the identity.
enum class AnchorConvention { half_open, centered };

/// <gamma_m | e~^level_anchor> / 2^(level + 1), exact for any anchor.
double haar_coefficient(std::int64_t m, int level, std::int64_t anchor);

/// <M - G | e~^i_l (x) e~^j_k> from the retained hierarchies; nodes
/// outside the grid contribute 0.
double haar_node(const CoupledRealization& r, int i, std::int64_t l, int j, std::int64_t k);

struct DecompositionReport {
  std::int64_t u = 0;
  std::int64_t v = 0;
  double T = 0.0;
  double T1 = 0.0;
  double T2 = 0.0;
  double boundary_row = 0.0;  // beta <M - G | e (x) (gamma_u - alpha e)>
  double boundary_col = 0.0;  // alpha <M - G | (delta_v - beta e) (x) e>
  double direct_error = 0.0;
  double residual = 0.0;      // T + boundaries - direct
};

DecompositionReport decompose_error(const CoupledRealization& r, const ScaleParams& p, std::int64_t u,
                                    std::int64_t v, AnchorConvention conv = AnchorConvention::half_open);
/// Same, reusing a precomputed surface for the corner values.
DecompositionReport decompose_error(const CoupledRealization& r, const ScaleParams& p, std::int64_t u,
                                    std::int64_t v, const ErrorSurface& surface,
                                    AnchorConvention conv = AnchorConvention::half_open);

struct ThetaReport {
  bool theta0_holds = true;
  bool theta1_holds = true;
  double worst_ratio_theta0 = 0.0;  // max |U - mean| / mean over the events
  std::vector<double> row_sums;     // first family, index i - Bstar
  std::vector<double> col_sums;     // second family, index j - Astar
  double bound = 0.0;               // x/2 + c_tilde log(nab)

  bool holds() const { return theta0_holds && theta1_holds; }
};

ThetaReport theta_events(const CoupledRealization& r, const ScaleParams& p, std::int64_t u, std::int64_t v);

/// 8 sum exp(-gamma 2^(i+j+1-N) h(eps)) over the index sets of the
/// closeness events; bounds P(Theta_0^c).
double theta0_union_bound(const ScaleParams& p);

struct MartingaleNode {
  int i = 0;
  int j = 0;
  std::int64_t l = 0;
  std::int64_t k = 0;
  double coeff = 0.0;  // c^i_v c^j_u
  Count parent = 0;    // S
  Count margin_h = 0;  // R1 = U^{i+1,l/2}_{j,k}
  Count margin_v = 0;  // R2 = U^{i,l}_{j+1,k/2}
  Count cell = 0;      // U^{i,l}_{j,k}
  double cond_mean = 0.0;
  double cond_var = 0.0;
  double xi = 0.0;
  double delta = 0.0;
  double delta_tilde = 0.0;
  double delta_a = 0.0;
  double delta_b = 0.0;
  double delta_c = 0.0;
  double inner = 0.0;  // <M - G | e~ (x) e~>

  /// 4 (dA + dB + dC) - coeff * inner
  double recombination_error() const { return 4.0 * (delta_a + delta_b + delta_c) - coeff * inner; }
};

/// One term C^{i,l(i,v)} = sum_j dC with its conditional variance given
/// the coarser vertical scales: sum_s M_s alpha_s^2.
struct CTerm {
  int i = 0;
  double value = 0.0;
  double cond_var = 0.0;
  std::vector<Count> block_counts;  // M_1, M_2, ...
  std::vector<double> weights;      // the alpha attached to each block
  std::vector<Count> block_diffs;   // realized <M | e~^i_l (x) block>, sums of M_s signs
};

struct MartingaleIncrements {
  std::vector<MartingaleNode> nodes;  // filtration order: i from N-1 down, j from N-1 down
  std::vector<CTerm> c_terms;         // i from N-1 down to Bstar
  double sum_a = 0.0;
  double sum_b = 0.0;
  double sum_c = 0.0;
};

MartingaleIncrements martingale_increments(const CoupledRealization& r, const ScaleParams& p, std::int64_t u,
                                           std::int64_t v);

/// Conditional moments of the (even, even) cell given its margins, in the
/// binomial form used by the hypergeometric coupling lemma.
double hyper_cond_mean(Count s, Count r1, Count r2);
double hyper_cond_var(Count s, Count r1, Count r2);

/// The two variance inequalities evaluated on one (u, v).
struct VarianceReport {
  double max_term = 0.0;  // max of (c c)^2 (Var - gamma 2^(i+j-N)/4)^2 / (gamma 2^(i+j-N+2))
  double sum_terms = 0.0;
  double theta_a = 0.0;
  double theta_b = 0.0;
  double rhs_a = 0.0;  // theta_a (x/2 + c_tilde log(nab))
  double rhs_b = 0.0;  // theta_b (x/2 + c_tilde log(nab))^2
  bool a_holds = true;
  bool b_holds = true;
};

double variance_theta_a(double eps = kThetaEpsilon);
double variance_theta_b(double eps = kThetaEpsilon);
VarianceReport variance_bounds(const MartingaleIncrements& inc, const ScaleParams& p);

}  // namespace hc
