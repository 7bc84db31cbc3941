#include "hc/field.hpp"

#include <cmath>
#include <string>

namespace hc {

namespace {

void check_finest(const GridSpec& spec, int finest) {
  if (finest < 0 || finest > spec.N) throw InvalidParameter("finest level must lie in [0, N]");
}

GaussianHierarchy empty_hierarchy(const GridSpec& spec, int finest) {
  check_finest(spec, finest);
  const int N = spec.N;
  GaussianHierarchy h;
  h.depth = N;
  h.finest = finest;
  h.row_v.resize(static_cast<std::size_t>(N));
  h.col_v.resize(static_cast<std::size_t>(N));
  h.interior.assign(static_cast<std::size_t>(N), std::vector<Grid<double>>(static_cast<std::size_t>(N)));
  for (int t = finest; t < N; ++t) {
    const Eigen::Index len = Eigen::Index{1} << (N - t - 1);
    h.row_v[static_cast<std::size_t>(t)] = Vec<double>::Zero(len);
    h.col_v[static_cast<std::size_t>(t)] = Vec<double>::Zero(len);
  }
  for (int i = finest; i < N; ++i)
    for (int j = finest; j < N; ++j)
      h.interior[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          Grid<double>::Zero(Eigen::Index{1} << (N - i - 1), Eigen::Index{1} << (N - j - 1));
  return h;
}

template <typename Dense>
void fill_normal(Dense& target, double sd, std::normal_distribution<double>& nd, Rng& rng) {
  for (Eigen::Index r = 0; r < target.rows(); ++r)
    for (Eigen::Index c = 0; c < target.cols(); ++c) target(r, c) = sd * nd(rng);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) { return splitmix64(master ^ splitmix64(index)); }

Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

GaussianHierarchy GaussianHierarchy::zeros(const GridSpec& spec, int finest) { return empty_hierarchy(spec, finest); }

double chain_variance(const GridSpec& spec, int level) { return spec.gamma * std::ldexp(1.0, level) / 2.0; }

double interior_variance(const GridSpec& spec, int i, int j) {
  return spec.gamma * std::ldexp(1.0, i + j - spec.N) / 4.0;
}

GaussianHierarchy sample_hierarchy(const GridSpec& spec, Rng& rng, int finest) {
  GaussianHierarchy h = empty_hierarchy(spec, finest);
  const int N = spec.N;
  std::normal_distribution<double> nd(0.0, 1.0);
  h.root = std::sqrt(static_cast<double>(spec.n)) * nd(rng);
  // stage t adds every coordinate whose smaller level index is t
  for (int t = N - 1; t >= finest; --t) {
    const auto ut = static_cast<std::size_t>(t);
    const double sd_chain = std::sqrt(chain_variance(spec, t));
    fill_normal(h.row_v[ut], sd_chain, nd, rng);
    fill_normal(h.col_v[ut], sd_chain, nd, rng);
    for (int i = N - 1; i >= t; --i)
      fill_normal(h.interior[static_cast<std::size_t>(i)][ut], std::sqrt(interior_variance(spec, i, t)), nd, rng);
    for (int j = N - 1; j > t; --j)
      fill_normal(h.interior[ut][static_cast<std::size_t>(j)], std::sqrt(interior_variance(spec, t, j)), nd, rng);
  }
  return h;
}

namespace {

DyadicHierarchy<double> build_z(const GaussianHierarchy& h, const GridSpec& spec, bool retain) {
  const int N = spec.N;
  if (h.depth != N) throw InvalidParameter("hierarchy depth does not match grid");
  const Chain<double> horizontal = refine_chain<double>(
      N, h.finest, h.root, [&](int j, Eigen::Index k, double parent) {
        return parent / 2.0 + h.row_v[static_cast<std::size_t>(j)](k);
      });
  const Chain<double> vertical = refine_chain<double>(
      N, h.finest, h.root, [&](int i, Eigen::Index l, double parent) {
        return parent / 2.0 + h.col_v[static_cast<std::size_t>(i)](l);
      });
  return refine_interior<double>(
      N, h.finest, horizontal, vertical,
      [&](int i, int j, Eigen::Index l, Eigen::Index k, double s, double r1, double r2) {
        return h.interior[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)](l, k) + r1 / 2.0 + r2 / 2.0 -
               s / 4.0;
      },
      retain);
}

}  // namespace

DyadicHierarchy<double> reconstruct_z_hierarchy(const GaussianHierarchy& h, const GridSpec& spec) {
  return build_z(h, spec, true);
}

WienerField reconstruct_z(const GaussianHierarchy& h, const GridSpec& spec) {
  DyadicHierarchy<double> z = build_z(h, spec, false);
  WienerField w;
  w.finest = h.finest;
  w.increments = std::move(z.level_mut(h.finest, h.finest));
  w.root_total = h.root;
  return w;
}

GaussianHierarchy derive_v(const DyadicHierarchy<double>& z, const GridSpec& spec) {
  const int N = spec.N;
  const int L = z.finest();
  GaussianHierarchy h = empty_hierarchy(spec, L);
  h.root = z(N, 0, N, 0);
  for (int t = L; t < N; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    const Grid<double>& row = z.level(N, t);
    for (Eigen::Index k = 0; k < h.row_v[ut].size(); ++k) h.row_v[ut](k) = (row(0, 2 * k) - row(0, 2 * k + 1)) / 2.0;
    const Grid<double>& col = z.level(t, N);
    for (Eigen::Index l = 0; l < h.col_v[ut].size(); ++l) h.col_v[ut](l) = (col(2 * l, 0) - col(2 * l + 1, 0)) / 2.0;
  }
  for (int i = L; i < N; ++i)
    for (int j = L; j < N; ++j) {
      const Grid<double>& g = z.level(i, j);
      Grid<double>& v = h.interior[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      for (Eigen::Index l = 0; l < v.rows(); ++l)
        for (Eigen::Index k = 0; k < v.cols(); ++k)
          v(l, k) = (g(2 * l, 2 * k) - g(2 * l + 1, 2 * k) - g(2 * l, 2 * k + 1) + g(2 * l + 1, 2 * k + 1)) / 4.0;
    }
  return h;
}

Grid<double> bridge_at_corners(const WienerField& w, const GridSpec& /*spec*/) {
  const Eigen::Index side = w.increments.rows();
  Grid<double> out = Grid<double>::Zero(side + 1, side + 1);
  const double cells = static_cast<double>(side);
  for_each_prefix_row(w.increments, [&](Eigen::Index r, const Vec<double>& row) {
    const double s = static_cast<double>(r + 1) / cells;
    for (Eigen::Index c = 0; c < side; ++c) {
      const double t = static_cast<double>(c + 1) / cells;
      out(r + 1, c + 1) = row(c) - t * s * w.root_total;
    }
  });
  return out;
}

}  // namespace hc
