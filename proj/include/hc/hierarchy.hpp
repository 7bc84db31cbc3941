#pragma once

#include <string>
#include <type_traits>
#include <vector>

#include "hc/dyadic.hpp"
#include "hc/errors.hpp"

namespace hc {

/// Values X^{i,l}_{j,k} on the dyadic rectangles of a 2^N x 2^N grid.
/// Level (i, j) is stored as a 2^(N-i) x 2^(N-j) grid indexed (l, k);
/// i is the vertical scale, j the horizontal one.  Only levels in
/// [finest, N] exist; levels dropped while streaming are empty.
template <typename Scalar>
class DyadicHierarchy {
 public:
  DyadicHierarchy() = default;
  DyadicHierarchy(int depth, int finest)
      : depth_(depth),
        finest_(finest),
        levels_(static_cast<std::size_t>(depth + 1), std::vector<Grid<Scalar>>(static_cast<std::size_t>(depth + 1))) {}

  int depth() const { return depth_; }
  int finest() const { return finest_; }

  bool has(int i, int j) const {
    return i >= finest_ && j >= finest_ && i <= depth_ && j <= depth_ && level_ref(i, j).size() > 0;
  }

  const Grid<Scalar>& level(int i, int j) const {
    if (!has(i, j))
      throw ModeError("hierarchy level (" + std::to_string(i) + ", " + std::to_string(j) + ") was not retained");
    return level_ref(i, j);
  }
  Grid<Scalar>& level_mut(int i, int j) { return levels_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }

  Scalar operator()(int i, Eigen::Index l, int j, Eigen::Index k) const { return level(i, j)(l, k); }

  void drop_row(int i) {
    for (auto& g : levels_[static_cast<std::size_t>(i)]) g.resize(0, 0);
  }

 private:
  const Grid<Scalar>& level_ref(int i, int j) const {
    return levels_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }

  int depth_ = 0;
  int finest_ = 0;
  std::vector<std::vector<Grid<Scalar>>> levels_;
};

/// One-dimensional marginal chain: chain[level] has 2^(N-level) entries.
template <typename Scalar>
using Chain = std::vector<Vec<Scalar>>;

/// Splits root into a chain down to `finest`; split(level, index, parent)
/// returns the even child at `level`, the odd child is parent - even.
template <typename Scalar, typename Split>
Chain<Scalar> refine_chain(int depth, int finest, Scalar root, Split&& split) {
  Chain<Scalar> chain(static_cast<std::size_t>(depth + 1));
  chain[static_cast<std::size_t>(depth)] = Vec<Scalar>::Constant(1, root);
  for (int lev = depth - 1; lev >= finest; --lev) {
    const Vec<Scalar>& parent = chain[static_cast<std::size_t>(lev + 1)];
    Vec<Scalar>& child = chain[static_cast<std::size_t>(lev)];
    child.resize(2 * parent.size());
    for (Eigen::Index k = 0; k < parent.size(); ++k) {
      const Scalar even = split(lev, k, parent(k));
      child(2 * k) = even;
      child(2 * k + 1) = parent(k) - even;
    }
  }
  return chain;
}

/// Fills the hierarchy from the horizontal chain (i = N) and the vertical
/// chain (j = N).  For i < N, j < N the split gives the (even, even)
/// child from split(i, j, l, k, S, R1, R2) with S = X^{i+1,l}_{j+1,k},
/// R1 = X^{i+1,l}_{j,2k}, R2 = X^{i,2l}_{j+1,k}; the other three children
/// follow by additivity.  Without `retain` only the finest row survives.
template <typename Scalar, typename Split>
DyadicHierarchy<Scalar> refine_interior(int depth, int finest, const Chain<Scalar>& horizontal,
                                        const Chain<Scalar>& vertical, Split&& split, bool retain) {
  DyadicHierarchy<Scalar> h(depth, finest);
  for (int j = finest; j <= depth; ++j)
    h.level_mut(depth, j) = horizontal[static_cast<std::size_t>(j)].transpose();
  for (int i = depth - 1; i >= finest; --i) {
    h.level_mut(i, depth) = vertical[static_cast<std::size_t>(i)];
    for (int j = depth - 1; j >= finest; --j) {
      const Grid<Scalar>& S = h.level(i + 1, j + 1);
      const Grid<Scalar>& R1 = h.level(i + 1, j);
      const Grid<Scalar>& R2 = h.level(i, j + 1);
      Grid<Scalar>& out = h.level_mut(i, j);
      out.resize(2 * R1.rows(), R1.cols());
      for (Eigen::Index l = 0; l < S.rows(); ++l) {
        for (Eigen::Index k = 0; k < S.cols(); ++k) {
          const Scalar s = S(l, k);
          const Scalar r1 = R1(l, 2 * k);
          const Scalar r2 = R2(2 * l, k);
          const Scalar ee = split(i, j, l, k, s, r1, r2);
          out(2 * l, 2 * k) = ee;
          out(2 * l, 2 * k + 1) = r2 - ee;
          out(2 * l + 1, 2 * k) = r1 - ee;
          out(2 * l + 1, 2 * k + 1) = s - r1 - r2 + ee;
          if constexpr (std::is_integral_v<Scalar>) {
            if (ee < 0 || r2 - ee < 0 || r1 - ee < 0 || s - r1 - r2 + ee < 0)
              throw ConsistencyError("negative count at level (" + std::to_string(i) + ", " +
                                     std::to_string(j) + ")");
          }
        }
      }
    }
    if (!retain) h.drop_row(i + 1);
  }
  return h;
}

}  // namespace hc
