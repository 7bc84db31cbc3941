#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <type_traits>
#include <vector>

#include "hc/errors.hpp"

namespace hc {

/// Dense row-major 2-D storage; row index is the vertical (s) position.
template <typename Scalar>
using Grid = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vec = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

inline constexpr int kMaxDepth = 13;

struct GridSpec {
  std::int64_t n = 1;
  int N = 0;
  double gamma = 1.0;

  std::int64_t side() const { return std::int64_t{1} << N; }
};

/// Smallest N with n <= 2^N.
GridSpec make_grid(std::int64_t n, int max_depth = kMaxDepth);

/// num / 2^exp
struct DyadicRational {
  std::int64_t num = 0;
  int exp = 0;

  double value() const { return static_cast<double>(num) / static_cast<double>(std::int64_t{1} << exp); }
  bool operator==(const DyadicRational&) const = default;
};

struct ScaleParams {
  GridSpec spec;
  double a = 1.0;
  double b = 1.0;
  double x = 0.0;
  double c_tilde = 0.0;
  int A = 0;
  int B = 0;
  int Astar = 0;
  int Bstar = 0;
  double threshold = 0.0;  // x/2 + c_tilde log(nab)
  double c1 = 0.0;         // constant of the main theorem
  std::vector<int> m_of_i;   // M(i), i in [Bstar, N-1]; -1 elsewhere
  std::vector<int> mm_of_j;  // script M(j), j in [Astar, N-1]
  std::vector<double> alpha;  // alpha_j, j in [0, N-1]
  std::vector<double> beta;   // beta_i

  int M(int i) const { return m_of_i.at(static_cast<std::size_t>(i)); }
  int MM(int j) const { return mm_of_j.at(static_cast<std::size_t>(j)); }
};

/// ln(max(v, e)), the logarithm convention of the error bound.
double log_floor_e(double v);

/// Scale parameters from (a, b, x, c_tilde); regime error outside the
/// main-theorem case.
ScaleParams make_scale_params(const GridSpec& spec, double a, double b, double x, double c_tilde);

/// Scale parameters from explicit levels, bypassing the regime check.
/// Needs A + Bstar == Astar + B, 0 <= Astar <= A - 2, 0 <= Bstar <= B - 2.
ScaleParams scale_params_from_levels(const GridSpec& spec, int A, int B, int Astar, int Bstar);

/// Even k with m in (k 2^j, (k + 2) 2^j].
std::int64_t k_anchor(int j, std::int64_t m);

/// Even l with m in ((l - 1) 2^i, (l + 1) 2^i], the centered window.
std::int64_t centered_anchor(int i, std::int64_t m);

struct HaarExpansion {
  std::int64_t m = 0;
  int base_level = 0;
  int depth = 0;
  std::vector<DyadicRational> coeffs;  // index j - base_level
  std::vector<std::int64_t> anchors;
  std::vector<int> signs;
  DyadicRational residual;

  DyadicRational coeff(int j) const {
    if (j < base_level || j >= depth) return {};
    return coeffs[static_cast<std::size_t>(j - base_level)];
  }
  std::int64_t anchor(int j) const { return anchors.at(static_cast<std::size_t>(j - base_level)); }
};

HaarExpansion haar_expand(std::int64_t m, int base_level, const GridSpec& spec);

/// 2^(N+1) times the vector rebuilt from the expansion, indexed by finest cell.
std::vector<std::int64_t> haar_reconstruct_scaled(const HaarExpansion& h);

template <typename Scalar>
using Accum = std::conditional_t<std::is_integral_v<Scalar>, std::int64_t, Scalar>;

namespace detail {
template <typename T>
inline void accumulate(T& acc, T v) {
  if constexpr (std::is_integral_v<T>) {
    if (__builtin_add_overflow(acc, v, &acc)) throw OverflowError("prefix sum overflows 64-bit accumulator");
  } else {
    acc += v;
  }
}
}  // namespace detail

/// Streams the cumulative array one row at a time: f(r, row) with
/// row[c] = sum of cells[r'][c'] over r' <= r, c' <= c.
template <typename Derived, typename F>
void for_each_prefix_row(const Eigen::DenseBase<Derived>& cells, F&& f) {
  using Out = Accum<typename Derived::Scalar>;
  Vec<Out> running = Vec<Out>::Zero(cells.cols());
  for (Eigen::Index r = 0; r < cells.rows(); ++r) {
    Out row_acc = 0;
    for (Eigen::Index c = 0; c < cells.cols(); ++c) {
      detail::accumulate<Out>(row_acc, static_cast<Out>(cells(r, c)));
      detail::accumulate<Out>(running(c), row_acc);
    }
    f(r, static_cast<const Vec<Out>&>(running));
  }
}

template <typename Derived>
Grid<Accum<typename Derived::Scalar>> prefix_sum_2d(const Eigen::DenseBase<Derived>& cells) {
  Grid<Accum<typename Derived::Scalar>> out(cells.rows(), cells.cols());
  for_each_prefix_row(cells, [&](Eigen::Index r, const auto& row) { out.row(r) = row.transpose(); });
  return out;
}

}  // namespace hc
