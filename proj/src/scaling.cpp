#include "hc/scaling.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "hc/coupling.hpp"
#include "hc/diagnostics.hpp"
#include "hc/errors.hpp"
#include "hc/parallel.hpp"

namespace hc {

std::vector<ScalingRow> run_scaling(const ScalingConfig& cfg) {
  if (cfg.reps < 2) throw InvalidParameter("run_scaling: need at least two replications");
  for (double q : cfg.levels)
    if (!(q > 0.0 && q < 1.0)) throw InvalidParameter("run_scaling: quantile levels must lie in (0, 1)");
  std::vector<double> levels = cfg.levels;
  std::sort(levels.begin(), levels.end());
  std::vector<GridSpec> specs;
  for (std::int64_t n : cfg.ns) specs.push_back(make_grid(n));  // throws past the depth cap

  const std::size_t reps = static_cast<std::size_t>(cfg.reps);
  std::vector<double> sups(specs.size() * reps);
  // largest grids first so the slowest jobs do not trail
  std::vector<std::size_t> order(sups.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return specs[a / reps].N > specs[b / reps].N; });
  parallel_for(order.size(), [&](std::size_t job) {
    const std::size_t idx = order[job];
    const GridSpec& spec = specs[idx / reps];
    const std::uint64_t seed = derive_seed(derive_seed(cfg.seed, static_cast<std::uint64_t>(spec.n)), idx % reps);
    sups[idx] = error_summary(couple(spec, seed)).sup_abs;
  });

  std::vector<ScalingRow> rows;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    std::vector<double> v(sups.begin() + static_cast<std::ptrdiff_t>(s * reps),
                          sups.begin() + static_cast<std::ptrdiff_t>((s + 1) * reps));
    std::sort(v.begin(), v.end());
    ScalingRow row;
    row.n = specs[s].n;
    row.N = specs[s].N;
    row.reps = cfg.reps;
    row.levels = levels;
    for (double q : levels) row.quantiles.push_back(quantile_with_se(v, q));
    const Eigen::Map<const Eigen::ArrayXd> a(v.data(), static_cast<Eigen::Index>(v.size()));
    row.mean = a.mean();
    row.stderr_mean = std::sqrt((a - row.mean).square().sum() / (a.size() - 1) / a.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

ExponentFit fit_exponent(const std::vector<ScalingRow>& rows, std::size_t level_index) {
  ExponentFit fit;
  std::vector<double> x, y;
  for (const ScalingRow& r : rows) {
    if (level_index >= r.quantiles.size()) throw InvalidParameter("fit_exponent: level index out of range");
    fit.level = r.levels[level_index];
    const double q = r.quantiles[level_index].value;
    if (r.n < 3 || q <= 0.0) continue;
    x.push_back(std::log(std::log(static_cast<double>(r.n))));
    y.push_back(std::log(q));
  }
  fit.points = x.size();
  std::vector<double> distinct = x;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) {
    fit.note = "insufficient points: need two distinct n >= 3";
    return fit;
  }
  const Eigen::Index m = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd design(m, 2);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = x[static_cast<std::size_t>(i)];
    rhs(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector2d beta = design.colPivHouseholderQr().solve(rhs);
  fit.ok = true;
  fit.log_c = beta(0);
  fit.p = beta(1);
  if (m > 2) {
    const double rss = (design * beta - rhs).squaredNorm();
    const Eigen::Matrix2d cov = (design.transpose() * design).inverse() * (rss / static_cast<double>(m - 2));
    fit.p_se = std::sqrt(cov(1, 1));
  }
  return fit;
}

std::vector<RatioPoint> ratio_series(const std::vector<ScalingRow>& rows, std::size_t level_index) {
  std::vector<RatioPoint> out;
  for (const ScalingRow& r : rows) {
    if (r.n < 3) continue;
    const double ln = std::log(static_cast<double>(r.n));
    const QuantileEstimate& q = r.quantiles.at(level_index);
    RatioPoint p;
    p.n = r.n;
    p.ratio2 = q.value / (ln * ln);
    p.ratio2_se = q.se / (ln * ln);
    p.ratio32 = q.value / std::pow(ln, 1.5);
    p.ratio32_se = q.se / std::pow(ln, 1.5);
    out.push_back(p);
  }
  return out;
}

ScalingVerdict scaling_properties(const std::vector<ScalingRow>& rows, std::size_t level_index, double se_mult,
                                  double p_lo, double p_hi) {
  ScalingVerdict v;
  std::vector<const ScalingRow*> sorted;
  for (const ScalingRow& r : rows) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const ScalingRow* a, const ScalingRow* b) { return a->n < b->n; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const QuantileEstimate& a = sorted[i - 1]->quantiles.at(level_index);
    const QuantileEstimate& b = sorted[i]->quantiles.at(level_index);
    if (b.value < a.value - se_mult * std::hypot(a.se, b.se)) v.nondecreasing = false;
  }
  std::vector<ScalingRow> ordered;
  for (const ScalingRow* r : sorted) ordered.push_back(*r);
  const std::vector<RatioPoint> ratios = ratio_series(ordered, level_index);
  for (std::size_t i = 1; i < ratios.size(); ++i)
    if (ratios[i].ratio2 > ratios[i - 1].ratio2 + se_mult * std::hypot(ratios[i].ratio2_se, ratios[i - 1].ratio2_se))
      v.ratio2_nonincreasing = false;
  v.fit = fit_exponent(ordered, level_index);
  v.level = v.fit.level;
  v.exponent_in_range = v.fit.ok && v.fit.p >= p_lo && v.fit.p <= p_hi;
  return v;
}

}  // namespace hc
