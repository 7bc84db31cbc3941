#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hc/dyadic.hpp"
#include "hc/hierarchy.hpp"

namespace hc {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
/// Seed of replication `index` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);
Rng make_rng(std::uint64_t seed);

/// Independent Gaussian coordinates of the Wiener hierarchy.  Levels
/// below `finest` are absent (coarse sampling).
struct GaussianHierarchy {
  int depth = 0;
  int finest = 0;
  double root = 0.0;                           // Z^{N,0}_{N,0}
  std::vector<Vec<double>> row_v;              // [j](k) = V^{N,0}_{j,2k}
  std::vector<Vec<double>> col_v;              // [i](l) = V^{i,2l}_{N,0}
  std::vector<std::vector<Grid<double>>> interior;  // [i][j](l,k) = V^{i,2l}_{j,2k}

  static GaussianHierarchy zeros(const GridSpec& spec, int finest = 0);
};

/// gamma 2^level / 2
double chain_variance(const GridSpec& spec, int level);
/// gamma 2^(i+j-N) / 4
double interior_variance(const GridSpec& spec, int i, int j);

/// Draws the hierarchy coarse-to-fine, so a coarse sample is a prefix of
/// the full sample drawn from the same generator state.
GaussianHierarchy sample_hierarchy(const GridSpec& spec, Rng& rng, int finest = 0);

/// sqrt(n) W over the cells of side 2^(finest - N), plus the total mass.
struct WienerField {
  int finest = 0;
  Grid<double> increments;
  double root_total = 0.0;
};

WienerField reconstruct_z(const GaussianHierarchy& h, const GridSpec& spec);
DyadicHierarchy<double> reconstruct_z_hierarchy(const GaussianHierarchy& h, const GridSpec& spec);
/// Inverse of reconstruction through the defining V formulas.
GaussianHierarchy derive_v(const DyadicHierarchy<double>& z, const GridSpec& spec);

/// sqrt(n) D at the corners (k, l) of the field's cell grid, indexed (l, k).
Grid<double> bridge_at_corners(const WienerField& w, const GridSpec& spec);

}  // namespace hc
