#include "hc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hc/distq.hpp"

namespace hc {

namespace {

double pow2(int e) { return std::ldexp(1.0, e); }

// Calls f(l, k, E) for every corner with l, k >= 1; corners on the axes are 0.
template <typename F>
void scan_corners(const CoupledRealization& r, double excess, F&& f) {
  const Eigen::Index side = r.m_field.rows();
  const Grid<double>& g = r.g_field.increments;
  if (g.rows() != side || g.cols() != side) throw InvalidParameter("field shapes differ");
  const double inv_area = 1.0 / (static_cast<double>(side) * static_cast<double>(side));
  Vec<std::int64_t> col_m = Vec<std::int64_t>::Zero(side);
  Vec<double> col_g = Vec<double>::Zero(side);
  for (Eigen::Index l = 0; l < side; ++l) {
    std::int64_t row_m = 0;
    double row_g = 0.0;
    for (Eigen::Index k = 0; k < side; ++k) {
      row_m += r.m_field(l, k);
      row_g += g(l, k);
      col_m(k) += row_m;
      col_g(k) += row_g;
      const double ts = static_cast<double>(k + 1) * static_cast<double>(l + 1) * inv_area;
      f(l + 1, k + 1, static_cast<double>(col_m(k)) - col_g(k) - ts * excess);
    }
  }
}

void require_retained(const CoupledRealization& r, const ScaleParams& p) {
  if (!r.retained()) throw ModeError("diagnostics need a realization coupled with retain = true");
  if (p.spec.N != r.spec.N || p.spec.n != r.spec.n) throw InvalidParameter("scale parameters belong to another grid");
}

struct Anchors {
  std::int64_t mu = 0;
  std::int64_t mv = 0;
  std::vector<std::int64_t> k;  // by level j
  std::vector<std::int64_t> l;  // by level i
  std::vector<double> cu;
  std::vector<double> cv;
};

Anchors make_anchors(const ScaleParams& p, std::int64_t u, std::int64_t v, AnchorConvention conv) {
  const int N = p.spec.N;
  if (u < 1 || u > (std::int64_t{1} << (p.A - p.Astar)))
    throw InvalidParameter("u must lie in [1, 2^(A - Astar)]");
  if (v < 1 || v > (std::int64_t{1} << (p.B - p.Bstar)))
    throw InvalidParameter("v must lie in [1, 2^(B - Bstar)]");
  Anchors a;
  a.mu = u << p.Astar;
  a.mv = v << p.Bstar;
  a.k.assign(static_cast<std::size_t>(N), 0);
  a.l.assign(static_cast<std::size_t>(N), 0);
  a.cu.assign(static_cast<std::size_t>(N), 0.0);
  a.cv.assign(static_cast<std::size_t>(N), 0.0);
  for (int lev = 0; lev < N; ++lev) {
    const auto s = static_cast<std::size_t>(lev);
    a.k[s] = k_anchor(lev, a.mu);
    a.l[s] = conv == AnchorConvention::half_open ? k_anchor(lev, a.mv) : centered_anchor(lev, a.mv);
    a.cu[s] = haar_coefficient(a.mu, lev, a.k[s]);
    a.cv[s] = haar_coefficient(a.mv, lev, a.l[s]);
  }
  return a;
}

Count count_at(const CountHierarchy& u, int i, std::int64_t l, int j, std::int64_t k) {
  const Grid<Count>& g = u.level(i, j);
  if (l < 0 || k < 0 || l >= g.rows() || k >= g.cols()) return 0;
  return g(l, k);
}

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

double ErrorSurface::restricted_sup(double a, double b) const {
  if (values.size() == 0) return 0.0;
  const double side = static_cast<double>(values.cols() - 1);
  const auto kmax = static_cast<Eigen::Index>(std::floor(std::clamp(a, 0.0, 1.0) * side));
  const auto lmax = static_cast<Eigen::Index>(std::floor(std::clamp(b, 0.0, 1.0) * side));
  return values.topLeftCorner(lmax + 1, kmax + 1).abs().maxCoeff();
}

ErrorSurface error_surface(const CoupledRealization& r) {
  ErrorSurface s;
  const Eigen::Index side = r.m_field.rows();
  s.excess = static_cast<double>(r.spec.n) - r.g_field.root_total;
  s.values = Grid<double>::Zero(side + 1, side + 1);
  scan_corners(r, s.excess, [&](Eigen::Index l, Eigen::Index k, double e) {
    s.values(l, k) = e;
    if (std::fabs(e) > s.sup_abs) {
      s.sup_abs = std::fabs(e);
      s.arg_l = l;
      s.arg_k = k;
    }
  });
  return s;
}

ErrorSummary error_summary(const CoupledRealization& r) {
  ErrorSummary s;
  scan_corners(r, static_cast<double>(r.spec.n) - r.g_field.root_total,
               [&](Eigen::Index l, Eigen::Index k, double e) {
                 if (std::fabs(e) > s.sup_abs) {
                   s.sup_abs = std::fabs(e);
                   s.arg_l = l;
                   s.arg_k = k;
                 }
               });
  return s;
}

double haar_coefficient(std::int64_t m, int level, std::int64_t anchor) {
  const std::int64_t w = std::int64_t{1} << level;
  auto overlap = [&](std::int64_t idx) { return std::clamp<std::int64_t>(m - idx * w, 0, w); };
  return static_cast<double>(overlap(anchor) - overlap(anchor + 1)) / static_cast<double>(2 * w);
}

double haar_node(const CoupledRealization& r, int i, std::int64_t l, int j, std::int64_t k) {
  if (!r.retained()) throw ModeError("diagnostics need a realization coupled with retain = true");
  const CountHierarchy& u = *r.counts;
  const double m = static_cast<double>(count_at(u, i, l, j, k)) - count_at(u, i, l + 1, j, k) -
                   count_at(u, i, l, j, k + 1) + count_at(u, i, l + 1, j, k + 1);
  const Grid<double>& v = r.gaussian->interior[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  double g = 0.0;
  if (l >= 0 && k >= 0 && l / 2 < v.rows() && k / 2 < v.cols()) g = 4.0 * v(l / 2, k / 2);
  return m - g;
}

DecompositionReport decompose_error(const CoupledRealization& r, const ScaleParams& p, std::int64_t u,
                                    std::int64_t v, AnchorConvention conv) {
  return decompose_error(r, p, u, v, error_surface(r), conv);
}

DecompositionReport decompose_error(const CoupledRealization& r, const ScaleParams& p, std::int64_t u,
                                    std::int64_t v, const ErrorSurface& surface, AnchorConvention conv) {
  require_retained(r, p);
  const int N = p.spec.N;
  const Anchors a = make_anchors(p, u, v, conv);
  DecompositionReport d;
  d.u = u;
  d.v = v;
  for (int i = p.Bstar; i < N; ++i) {
    const auto si = static_cast<std::size_t>(i);
    for (int j = p.Astar; j < N; ++j) {
      const auto sj = static_cast<std::size_t>(j);
      const double term = a.cv[si] * a.cu[sj] * haar_node(r, i, a.l[si], j, a.k[sj]);
      d.T += term;
      if (i <= p.B - 2 && j <= p.M(i))
        d.T1 += term;
      else
        d.T2 += term;
    }
  }
  const Eigen::Index side = r.m_field.rows();
  const double inv = 1.0 / static_cast<double>(side);
  const double alpha = static_cast<double>(a.mu) * inv;
  const double beta = static_cast<double>(a.mv) * inv;
  // cumulative M - G at a corner, recovered from the surface
  auto mg = [&](Eigen::Index l, Eigen::Index k) {
    return surface.values(l, k) + static_cast<double>(k) * inv * static_cast<double>(l) * inv * surface.excess;
  };
  d.boundary_row = beta * (mg(side, a.mu) - alpha * surface.excess);
  d.boundary_col = alpha * (mg(a.mv, side) - beta * surface.excess);
  d.direct_error = surface.values(a.mv, a.mu);
  d.residual = d.T + d.boundary_row + d.boundary_col - d.direct_error;
  return d;
}

ThetaReport theta_events(const CoupledRealization& r, const ScaleParams& p, std::int64_t u, std::int64_t v) {
  require_retained(r, p);
  const int N = p.spec.N;
  const double gamma = p.spec.gamma;
  const Anchors a = make_anchors(p, u, v, AnchorConvention::half_open);
  const CountHierarchy& U = *r.counts;
  ThetaReport t;
  t.bound = p.threshold;

  auto closeness = [&](int i, std::int64_t l, int j, std::int64_t k) {
    const double mean = gamma * pow2(i + j - N);
    const double rel = std::fabs(static_cast<double>(count_at(U, i, l, j, k)) - mean) / mean;
    t.worst_ratio_theta0 = std::max(t.worst_ratio_theta0, rel);
    if (rel > kThetaEpsilon) t.theta0_holds = false;
  };

  for (int i = p.Bstar; i < N; ++i) {
    const std::int64_t l = a.l[static_cast<std::size_t>(i)];
    double sum = 0.0;
    for (int j = p.M(i) + 1; j < N; ++j) {
      const std::int64_t k = a.k[static_cast<std::size_t>(j)];
      closeness(i + 1, l / 2, j, k);
      closeness(i + 1, l / 2, j, k + 1);
      closeness(i, l, j + 1, k / 2);
      closeness(i, l + 1, j + 1, k / 2);
      const double diff = static_cast<double>(count_at(U, i + 1, l / 2, j, k)) - count_at(U, i + 1, l / 2, j, k + 1);
      const double w = std::sqrt(p.alpha[static_cast<std::size_t>(j)] * p.beta[static_cast<std::size_t>(i)]);
      sum += w * ratio(diff * diff, count_at(U, i + 1, l / 2, j + 1, k / 2));
    }
    t.row_sums.push_back(sum);
    if (sum > t.bound) t.theta1_holds = false;
  }
  for (int j = p.Astar; j < N; ++j) {
    const std::int64_t k = a.k[static_cast<std::size_t>(j)];
    double sum = 0.0;
    for (int i = p.MM(j) + 1; i < N; ++i) {
      const std::int64_t l = a.l[static_cast<std::size_t>(i)];
      const double diff = static_cast<double>(count_at(U, i, l, j + 1, k / 2)) - count_at(U, i, l + 1, j + 1, k / 2);
      const double w = std::sqrt(p.alpha[static_cast<std::size_t>(j)] * p.beta[static_cast<std::size_t>(i)]);
      sum += w * ratio(diff * diff, count_at(U, i + 1, l / 2, j + 1, k / 2));
    }
    t.col_sums.push_back(sum);
    if (sum > t.bound) t.theta1_holds = false;
  }
  return t;
}

double theta0_union_bound(const ScaleParams& p) {
  const int N = p.spec.N;
  const double h = bennett_h(kThetaEpsilon);
  double total = 0.0;
  for (int i = p.Bstar; i < N; ++i)
    for (int j = p.M(i) + 1; j < N; ++j) total += 8.0 * std::exp(-p.spec.gamma * pow2(i + j + 1 - N) * h);
  return total;
}

double hyper_cond_mean(Count s, Count r1, Count r2) {
  if (s == 0) return 0.0;
  return static_cast<double>(r1) * static_cast<double>(r2) / static_cast<double>(s);
}

double hyper_cond_var(Count s, Count r1, Count r2) {
  if (s == 0) return 0.0;
  const double S = s;
  const double p1 = r1 / S, p2 = r2 / S;
  return S * p1 * (1.0 - p1) * p2 * (1.0 - p2);
}

MartingaleIncrements martingale_increments(const CoupledRealization& r, const ScaleParams& p, std::int64_t u,
                                           std::int64_t v) {
  require_retained(r, p);
  const int N = p.spec.N;
  const Anchors a = make_anchors(p, u, v, AnchorConvention::half_open);
  const CountHierarchy& U = *r.counts;
  MartingaleIncrements out;
  for (int i = N - 1; i >= p.Bstar; --i) {
    const std::int64_t l = a.l[static_cast<std::size_t>(i)];
    const double cv = a.cv[static_cast<std::size_t>(i)];
    // delta and c per j for the C term
    std::vector<double> cd(static_cast<std::size_t>(N), 0.0);
    CTerm ct;
    ct.i = i;
    for (int j = N - 1; j >= p.M(i) + 1; --j) {
      const std::int64_t k = a.k[static_cast<std::size_t>(j)];
      MartingaleNode nd;
      nd.i = i;
      nd.j = j;
      nd.l = l;
      nd.k = k;
      nd.coeff = cv * a.cu[static_cast<std::size_t>(j)];
      nd.parent = count_at(U, i + 1, l / 2, j + 1, k / 2);
      nd.margin_h = count_at(U, i + 1, l / 2, j, k);
      nd.margin_v = count_at(U, i, l, j + 1, k / 2);
      nd.cell = count_at(U, i, l, j, k);
      nd.cond_mean = hyper_cond_mean(nd.parent, nd.margin_h, nd.margin_v);
      nd.cond_var = hyper_cond_var(nd.parent, nd.margin_h, nd.margin_v);
      const double sigma = std::sqrt(interior_variance(p.spec, i, j));
      const double vv =
          r.gaussian->interior[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)](l / 2, k / 2);
      nd.xi = vv / sigma;
      const double S = nd.parent;
      nd.delta = ratio(2.0 * nd.margin_h - S, S);
      nd.delta_tilde = ratio(2.0 * nd.margin_v - S, S);
      const double sd = std::sqrt(nd.cond_var);
      nd.delta_a = nd.coeff * (nd.cell - nd.cond_mean - sd * nd.xi);
      nd.delta_b = nd.coeff * (sd - sigma) * nd.xi;
      nd.delta_c = nd.coeff / 4.0 * S * nd.delta * nd.delta_tilde;
      nd.inner = haar_node(r, i, l, j, k);
      out.sum_a += nd.delta_a;
      out.sum_b += nd.delta_b;
      out.sum_c += nd.delta_c;
      ct.value += nd.delta_c;
      cd[static_cast<std::size_t>(j)] = nd.coeff / 4.0 * nd.delta;
      out.nodes.push_back(nd);
    }
    // C^i = alpha_{M(i)+1} X_1 + sum_r alpha_r X_r over the sibling blocks
    const int m1 = p.M(i) + 1;
    std::vector<double> alpha_r(static_cast<std::size_t>(N + 1), 0.0);
    for (int rr = N - 1; rr >= m1; --rr)
      alpha_r[static_cast<std::size_t>(rr)] = alpha_r[static_cast<std::size_t>(rr + 1)] + cd[static_cast<std::size_t>(rr)];
    const std::int64_t own = (a.mu - 1) >> m1;
    auto add_block = [&](int lev, std::int64_t idx, double w) {
      ct.block_counts.push_back(count_at(U, i + 1, l / 2, lev, idx));
      ct.block_diffs.push_back(count_at(U, i, l, lev, idx) - count_at(U, i, l + 1, lev, idx));
      ct.weights.push_back(w);
    };
    add_block(m1, own, alpha_r[static_cast<std::size_t>(m1)]);
    for (int rr = m1; rr < N; ++rr) add_block(rr, ((a.mu - 1) >> rr) ^ 1, alpha_r[static_cast<std::size_t>(rr)]);
    for (std::size_t s = 0; s < ct.block_counts.size(); ++s)
      ct.cond_var += static_cast<double>(ct.block_counts[s]) * ct.weights[s] * ct.weights[s];
    out.c_terms.push_back(std::move(ct));
  }
  return out;
}

double variance_theta_a(double eps) {
  return 3.0 * (1.0 + eps) / 512.0 * (1.0 / (std::sqrt(2.0) - 1.0) + eps * eps / 2.0);
}

double variance_theta_b(double eps) {
  const double q = 1.0 / (std::pow(2.0, 0.25) - 1.0);
  return 3.0 * (1.0 + eps) / 512.0 * (q * q + eps * eps) * (1.0 + 1.0 / (10.0 * std::log(2.0)));
}

VarianceReport variance_bounds(const MartingaleIncrements& inc, const ScaleParams& p) {
  VarianceReport rep;
  for (const MartingaleNode& nd : inc.nodes) {
    const double scale = p.spec.gamma * pow2(nd.i + nd.j - p.spec.N);
    const double d = nd.cond_var - scale / 4.0;
    const double term = nd.coeff * nd.coeff * d * d / (4.0 * scale);
    rep.max_term = std::max(rep.max_term, term);
    rep.sum_terms += term;
  }
  rep.theta_a = variance_theta_a();
  rep.theta_b = variance_theta_b();
  rep.rhs_a = rep.theta_a * p.threshold;
  rep.rhs_b = rep.theta_b * p.threshold * p.threshold;
  rep.a_holds = rep.max_term <= rep.rhs_a;
  rep.b_holds = rep.sum_terms <= rep.rhs_b;
  return rep;
}

}  // namespace hc
