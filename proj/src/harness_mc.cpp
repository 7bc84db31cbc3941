#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "hc/coupling.hpp"
#include "hc/diagnostics.hpp"
#include "hc/distq.hpp"
#include "hc/errors.hpp"
#include "hc/field.hpp"
#include "hc/harness.hpp"
#include "hc/parallel.hpp"
#include "hc/stats.hpp"

namespace hc {

namespace {

// Counts of a grid of tail events per replication, reduced in index order.
struct TailCounts {
  std::vector<std::int64_t> hits;
  std::vector<std::int64_t> extra;  // secondary family (unconditional tail, Gaussian sup)
};

std::string grid_point(const char* what, double x, double y) {
  std::ostringstream os;
  os.precision(12);
  os << what << " x=" << x << " y=" << y;
  return os.str();
}

void judge(ScanResult& res, const std::string& where, std::int64_t hits, std::int64_t reps, double bound,
           double se_mult) {
  const double p = static_cast<double>(hits) / static_cast<double>(reps);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
  ++res.checked;
  if (p > bound + se_mult * se) res.add_violation(where, p, bound + se_mult * se);
}

// Prefix sums of (d, sigma^2): sets hit[g] when some prefix has S >= x and
// V^2 <= y.  V^2 is nondecreasing, so the best prefix per y is the largest
// running sum before V^2 exceeds y.
void mark_prefix_hits(const std::vector<double>& d, const std::vector<double>& var, const std::vector<double>& xs,
                      const std::vector<double>& ys, std::vector<std::int64_t>& hits) {
  for (std::size_t yi = 0; yi < ys.size(); ++yi) {
    double s = 0.0, v = 0.0, best = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < d.size(); ++t) {
      v += var[t];
      if (v > ys[yi]) break;
      s += d[t];
      best = std::max(best, s);
    }
    for (std::size_t xi = 0; xi < xs.size(); ++xi)
      if (best >= xs[xi]) ++hits[yi * xs.size() + xi];
  }
}

}  // namespace

double dlp_bound(double x, double y, double c) { return std::exp(-x * x / (2.0 * (y + c * x))); }

ScanResult check_dlp_inequality(const DlpConfig& cfg) {
  if (cfg.reps < 1 || cfg.steps < 1 || cfg.xs.empty() || cfg.ys.empty())
    throw InvalidParameter("check_dlp_inequality: empty grid or replication count");
  const std::size_t cells = cfg.xs.size() * cfg.ys.size();
  const std::size_t reps = static_cast<std::size_t>(cfg.reps);

  // realized_c setup
  GridSpec spec;
  ScaleParams params;
  std::int64_t u = 1, v = 1;
  if (cfg.family == DlpFamily::realized_c) {
    spec = make_grid(cfg.n);
    if (spec.N - cfg.level_gap < 0 || cfg.level_gap < 2)
      throw InvalidParameter("check_dlp_inequality: level_gap must be in [2, N]");
    params = scale_params_from_levels(spec, spec.N, spec.N, spec.N - cfg.level_gap, spec.N - cfg.level_gap);
    u = v = (std::int64_t{1} << (cfg.level_gap - 1)) + 1;
  }

  const std::size_t chunk = 1000;
  const std::size_t nchunks = (reps + chunk - 1) / chunk;
  std::vector<TailCounts> parts(nchunks);
  parallel_for(nchunks, [&](std::size_t ci) {
    TailCounts& tc = parts[ci];
    tc.hits.assign(cells, 0);
    tc.extra.assign(cells, 0);
    std::vector<double> d, var;
    for (std::size_t r = ci * chunk; r < std::min(reps, (ci + 1) * chunk); ++r) {
      d.clear();
      var.clear();
      if (cfg.family == DlpFamily::realized_c) {
        const CoupledRealization real = couple(spec, derive_seed(cfg.seed, r), {.retain = true});
        const MartingaleIncrements inc = martingale_increments(real, params, u, v);
        double max_sigma = 0.0;
        for (const CTerm& t : inc.c_terms) {
          d.push_back(t.value);
          var.push_back(t.cond_var);
          max_sigma = std::max(max_sigma, std::sqrt(t.cond_var));
        }
        mark_prefix_hits(d, var, cfg.xs, cfg.ys, tc.extra);
        if (theta_events(real, params, u, v).holds() && max_sigma <= cfg.c)
          mark_prefix_hits(d, var, cfg.xs, cfg.ys, tc.hits);
        continue;
      }
      Rng rng = make_rng(derive_seed(cfg.seed, r));
      std::bernoulli_distribution coin(0.5);
      double s = 0.0;
      for (int t = 0; t < cfg.steps; ++t) {
        // predictable weight in [1/2, 1]: depends on the path so far only
        const double w = cfg.family == DlpFamily::predictable ? (s >= 0.0 ? 1.0 : 0.5) : 1.0;
        const double step = coin(rng) ? w : -w;
        s += step;
        d.push_back(step);
        var.push_back(w * w);
      }
      mark_prefix_hits(d, var, cfg.xs, cfg.ys, tc.hits);
    }
  });
  std::vector<std::int64_t> hits(cells, 0), extra(cells, 0);
  for (const TailCounts& tc : parts)
    for (std::size_t g = 0; g < cells; ++g) {
      hits[g] += tc.hits[g];
      extra[g] += tc.extra[g];
    }

  ScanResult res;
  res.name = "dlp";
  const char* fam = cfg.family == DlpFamily::rademacher    ? "rademacher"
                    : cfg.family == DlpFamily::predictable ? "predictable"
                                                           : "realized_c";
  std::ostringstream os;
  os << fam << " martingale, " << cfg.reps << " reps, " << cfg.xs.size() << "x" << cfg.ys.size()
     << " (x, y) grid, c=" << cfg.c;
  res.domain = os.str();
  for (std::size_t yi = 0; yi < cfg.ys.size(); ++yi)
    for (std::size_t xi = 0; xi < cfg.xs.size(); ++xi) {
      const std::size_t g = yi * cfg.xs.size() + xi;
      const double x = cfg.xs[xi], y = cfg.ys[yi];
      const double bound = std::pow(dlp_bound(x, y, cfg.c), cfg.exponent_scale);
      judge(res, grid_point(fam, x, y), hits[g], cfg.reps, bound, cfg.se_mult);
      res.metric(grid_point("freq", x, y), static_cast<double>(hits[g]) / static_cast<double>(cfg.reps));
      if (cfg.family == DlpFamily::realized_c)
        res.metric(grid_point("unconditional_freq", x, y),
                   static_cast<double>(extra[g]) / static_cast<double>(cfg.reps));
    }
  return res;
}

// Positive excursions peak exactly at point coordinates (closed counts);
// negative ones at left limits (strict counts) or at the far edges.
double empirical_rectangle_sup(const std::vector<std::pair<double, double>>& pts, std::int64_t n, double a,
                               double b) {
  std::vector<std::pair<double, double>> in;
  for (const auto& p : pts)
    if (p.first <= a && p.second <= b) in.push_back(p);
  std::sort(in.begin(), in.end());
  const double nn = static_cast<double>(n);
  double sup = 0.0;
  std::vector<double> col;  // sorted s of points already passed in t
  col.reserve(in.size());
  auto negative_at = [&](double t) {
    for (std::size_t r = 0; r < col.size(); ++r) sup = std::max(sup, nn * t * col[r] - static_cast<double>(r));
    sup = std::max(sup, nn * t * b - static_cast<double>(col.size()));
  };
  for (const auto& [t, s] : in) {
    negative_at(t);
    col.insert(std::upper_bound(col.begin(), col.end(), s), s);
    for (std::size_t r = 0; r < col.size(); ++r)
      sup = std::max(sup, static_cast<double>(r + 1) - nn * t * col[r]);
  }
  negative_at(a);
  return sup;
}

double maximal_bound_empirical(std::int64_t n, double a, double b, double x) {
  const double nab = static_cast<double>(n) * a * b;
  return 2.0 * std::exp(1.0) * std::exp(-nab * (1.0 - a * b) * bennett_h(x / nab));
}

double maximal_bound_gaussian(double a, double b, double x) {
  return 2.0 * std::exp(1.0) * std::exp(-x * x * (1.0 - a * b) / (2.0 * a * b));
}

ScanResult check_maximal_inequalities(const MaximalConfig& cfg) {
  if (cfg.a < 0 || cfg.b < 0 || cfg.a > 1 || cfg.b > 1 || cfg.a * cfg.b > 0.5)
    throw InvalidParameter("check_maximal_inequalities: need a, b in [0, 1] with ab <= 1/2");
  if (cfg.reps < 1 || cfg.n < 1 || cfg.gaussian_depth < 1 || cfg.gaussian_depth > kMaxDepth)
    throw InvalidParameter("check_maximal_inequalities: bad n, reps or depth");
  const std::size_t ne = cfg.xs_empirical.size(), ng = cfg.xs_gaussian.size();
  const std::size_t reps = static_cast<std::size_t>(cfg.reps);
  const GridSpec gspec = make_grid(std::int64_t{1} << cfg.gaussian_depth);
  const Eigen::Index side = Eigen::Index{1} << cfg.gaussian_depth;
  const Eigen::Index kmax = static_cast<Eigen::Index>(std::floor(cfg.a * static_cast<double>(side)));
  const Eigen::Index lmax = static_cast<Eigen::Index>(std::floor(cfg.b * static_cast<double>(side)));
  const double root_n = std::sqrt(static_cast<double>(gspec.n));

  const std::size_t chunk = 500;
  const std::size_t nchunks = (reps + chunk - 1) / chunk;
  std::vector<TailCounts> parts(nchunks);
  parallel_for(nchunks, [&](std::size_t ci) {
    TailCounts& tc = parts[ci];
    tc.hits.assign(ne, 0);
    tc.extra.assign(ng, 0);
    std::vector<std::pair<double, double>> pts(static_cast<std::size_t>(cfg.n));
    for (std::size_t r = ci * chunk; r < std::min(reps, (ci + 1) * chunk); ++r) {
      Rng rng = make_rng(derive_seed(cfg.seed, r));
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (auto& p : pts) {
        p.first = unif(rng);
        p.second = unif(rng);
      }
      const double se = empirical_rectangle_sup(pts, cfg.n, cfg.a, cfg.b);
      for (std::size_t g = 0; g < ne; ++g)
        if (se >= cfg.xs_empirical[g]) ++tc.hits[g];

      const GaussianHierarchy h = sample_hierarchy(gspec, rng);
      const Grid<double> d = bridge_at_corners(reconstruct_z(h, gspec), gspec);
      const double sg = d.topLeftCorner(lmax + 1, kmax + 1).abs().maxCoeff() / root_n;
      for (std::size_t g = 0; g < ng; ++g)
        if (sg >= cfg.xs_gaussian[g]) ++tc.extra[g];
    }
  });
  std::vector<std::int64_t> he(ne, 0), hg(ng, 0);
  for (const TailCounts& tc : parts) {
    for (std::size_t g = 0; g < ne; ++g) he[g] += tc.hits[g];
    for (std::size_t g = 0; g < ng; ++g) hg[g] += tc.extra[g];
  }

  ScanResult res;
  res.name = "maximal";
  std::ostringstream os;
  os << "sup over [0," << cfg.a << "]x[0," << cfg.b << "], n=" << cfg.n << ", " << cfg.reps
     << " reps; bridge on the 2^" << cfg.gaussian_depth << " corner grid";
  res.domain = os.str();
  for (std::size_t g = 0; g < ne; ++g) {
    const double x = cfg.xs_empirical[g];
    const double bound = std::pow(maximal_bound_empirical(cfg.n, cfg.a, cfg.b, x), cfg.exponent_scale) *
                         std::pow(2.0 * std::exp(1.0), 1.0 - cfg.exponent_scale);
    judge(res, grid_point("empirical", x, 0.0), he[g], cfg.reps, bound, cfg.se_mult);
    res.metric(grid_point("empirical_freq", x, 0.0), static_cast<double>(he[g]) / static_cast<double>(cfg.reps));
  }
  for (std::size_t g = 0; g < ng; ++g) {
    const double x = cfg.xs_gaussian[g];
    const double bound = std::pow(maximal_bound_gaussian(cfg.a, cfg.b, x), cfg.exponent_scale) *
                         std::pow(2.0 * std::exp(1.0), 1.0 - cfg.exponent_scale);
    judge(res, grid_point("gaussian", x, 0.0), hg[g], cfg.reps, bound, cfg.se_mult);
    res.metric(grid_point("gaussian_freq", x, 0.0), static_cast<double>(hg[g]) / static_cast<double>(cfg.reps));
  }
  return res;
}

ScanResult test_multinomial(const MultinomialConfig& cfg) {
  const GridSpec spec = make_grid(cfg.n);
  const Eigen::Index side = spec.side();
  const Eigen::Index nb = cfg.blocks_per_side;
  if (nb < 1 || side % nb != 0 || cfg.reps < 2)
    throw InvalidParameter("test_multinomial: blocks_per_side must divide the grid side; reps >= 2");
  const Eigen::Index block = side / nb;
  const double cells = static_cast<double>(nb * nb);
  const double expected = cfg.expected_scale * static_cast<double>(cfg.n) / cells;

  std::vector<double> stats(static_cast<std::size_t>(cfg.reps)), pvalues(stats.size());
  parallel_for(stats.size(), [&](std::size_t r) {
    const Grid<Count> m = couple(spec, derive_seed(cfg.seed, r)).m_field;
    double stat = 0.0;
    for (Eigen::Index bl = 0; bl < nb; ++bl)
      for (Eigen::Index bk = 0; bk < nb; ++bk) {
        const double obs = static_cast<double>(m.block(bl * block, bk * block, block, block).cast<std::int64_t>().sum());
        stat += (obs - expected) * (obs - expected) / expected;
      }
    stats[r] = stat;
    pvalues[r] = cells > 1 ? chi_square_sf(stat, cells - 1.0) : 1.0;
  });

  ScanResult res;
  res.name = "multinomial";
  std::ostringstream os;
  os << "n=" << cfg.n << ", N=" << spec.N << ", " << nb << "x" << nb << " blocks, " << cfg.reps << " reps";
  res.domain = os.str();
  res.checked = cfg.reps;
  res.metric("max_statistic", *std::max_element(stats.begin(), stats.end()));
  if (cells > 1) {
    const double ks = ks_statistic_uniform(pvalues);
    const double p = ks_pvalue(ks, pvalues.size());
    res.metric("ks_statistic", ks);
    res.metric("ks_pvalue", p);
    if (p < cfg.ks_level) res.add_violation("ks p-value of chi-square p-values", p, cfg.ks_level);
  }
  return res;
}

}  // namespace hc
