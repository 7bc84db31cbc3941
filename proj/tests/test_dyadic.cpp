#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hc/dyadic.hpp"

using namespace hc;

TEST(MakeGrid, Examples) {
  const GridSpec g = make_grid(496);
  EXPECT_EQ(g.N, 9);
  EXPECT_DOUBLE_EQ(g.gamma, 496.0 / 512.0);
  EXPECT_EQ(make_grid(1).N, 0);
  EXPECT_EQ(make_grid(1).gamma, 1.0);
  EXPECT_EQ(make_grid(1024).N, 10);
  EXPECT_EQ(make_grid(1024).gamma, 1.0);
  EXPECT_THROW(make_grid(0), InvalidParameter);
  EXPECT_THROW(make_grid((1 << 13) + 1), CapacityError);
  EXPECT_THROW(make_grid(300, 8), CapacityError);
}

TEST(MakeGrid, Invariants) {
  for (std::int64_t n = 1; n <= 9000; ++n) {
    const GridSpec g = make_grid(n, 14);
    if (g.N > 0) { EXPECT_LT(std::int64_t{1} << (g.N - 1), n); }
    EXPECT_LE(n, g.side());
    if (n > 1) { EXPECT_GT(g.gamma, 0.5); }
    EXPECT_LE(g.gamma, 1.0);
  }
}

namespace {

void check_scale_invariants(const ScaleParams& p) {
  const GridSpec& g = p.spec;
  const double n = static_cast<double>(g.n);
  EXPECT_LT(std::ldexp(1.0, p.A - 1), n * p.a);
  EXPECT_LE(n * p.a, std::ldexp(1.0, p.A));
  EXPECT_LT(std::ldexp(1.0, p.B - 1), n * p.b);
  EXPECT_LE(n * p.b, std::ldexp(1.0, p.B));
  EXPECT_EQ(p.A + p.Bstar, p.Astar + p.B);
  EXPECT_LE(p.Astar, p.A - 2);
  const double q = 4.0 * p.threshold / g.gamma;
  EXPECT_LT(std::ldexp(1.0, p.Astar + p.B - g.N), q);
  EXPECT_LE(q, std::ldexp(1.0, p.Astar + p.B - g.N + 1));
  for (int i = p.Bstar; i < g.N; ++i) {
    const double v = std::ldexp(1.0, i + p.M(i) - g.N);
    EXPECT_LE(p.threshold / (2 * g.gamma), v) << i;
    // the upper half of the sandwich only holds on the first branch
    if (i <= p.B - 1) { EXPECT_LT(v, p.threshold / g.gamma) << i; }
  }
  for (int j = p.Astar; j < g.N; ++j) {
    const double v = std::ldexp(1.0, j + p.MM(j) - g.N);
    EXPECT_LE(p.threshold / (2 * g.gamma), v) << j;
    if (j <= p.A - 1) { EXPECT_LT(v, p.threshold / g.gamma) << j; }
  }
  for (int j = 0; j < g.N; ++j) EXPECT_DOUBLE_EQ(p.alpha[j], std::min(0.5, std::ldexp(1.0, p.A) / std::ldexp(1.0, j + 1)));
}

}  // namespace

TEST(ScaleParams, Example4096) {
  const ScaleParams p = make_scale_params(make_grid(4096), 1, 1, 1, 10);
  // thr = 0.5 + 10 ln 4096 = 83.68; 4 thr = 334.7 in (2^8, 2^9]
  EXPECT_EQ(p.A, 12);
  EXPECT_EQ(p.B, 12);
  EXPECT_EQ(p.Astar, 8);
  EXPECT_EQ(p.Bstar, 8);
  check_scale_invariants(p);
}

TEST(ScaleParams, Example1024) {
  const ScaleParams p = make_scale_params(make_grid(1024), 1, 1, 20, 10);
  EXPECT_EQ(p.Astar, 8);
  EXPECT_EQ(p.M(8), 8);
  EXPECT_EQ(p.M(9), 7);
  check_scale_invariants(p);
}

TEST(ScaleParams, Regime) {
  EXPECT_THROW(make_scale_params(make_grid(400), 1, 1, 1, 10), RegimeError);
  EXPECT_THROW(make_scale_params(make_grid(4096), 0.1, 1, 1, 10), RegimeError);
  EXPECT_THROW(make_scale_params(make_grid(1024), 1, 1, 20, 70), RegimeError);
  EXPECT_THROW(make_scale_params(make_grid(1024), 1.5, 1, 1, 10), InvalidParameter);
  EXPECT_THROW(make_scale_params(make_grid(1024), 1, 1, 1, 5), InvalidParameter);
}

TEST(ScaleParams, FullIntervalLevels) {
  for (int N = 10; N <= 13; ++N) {
    const ScaleParams p = make_scale_params(make_grid(std::int64_t{1} << N), 1, 1, 2, 10);
    EXPECT_EQ(p.A, N);
    EXPECT_EQ(p.B, N);
  }
}

TEST(ScaleParams, RandomizedInvariants) {
  std::mt19937_64 rng(3);
  int accepted = 0;
  for (int t = 0; t < 3000; ++t) {
    const std::int64_t n = std::uniform_int_distribution<std::int64_t>(200, 8192)(rng);
    const double a = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    const double b = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    const double x = std::uniform_real_distribution<double>(0.01, 200.0)(rng);
    const double c = std::uniform_real_distribution<double>(10.0, 30.0)(rng);
    try {
      check_scale_invariants(make_scale_params(make_grid(n), a, b, x, c));
      ++accepted;
    } catch (const RegimeError&) {
    }
  }
  EXPECT_GT(accepted, 100);
}

TEST(ScaleParams, FromLevels) {
  const GridSpec g = make_grid(256);
  const ScaleParams p = scale_params_from_levels(g, 8, 8, 3, 3);
  check_scale_invariants(p);
  EXPECT_THROW(scale_params_from_levels(g, 8, 7, 3, 3), InvalidParameter);
  EXPECT_THROW(scale_params_from_levels(g, 8, 8, 7, 7), RegimeError);
}

TEST(KAnchor, Examples) {
  EXPECT_EQ(k_anchor(0, 3), 2);
  EXPECT_EQ(k_anchor(1, 4), 0);
  for (int j = 0; j < 8; ++j)
    for (std::int64_t m = 1; m <= (std::int64_t{1} << j); ++m) EXPECT_EQ(k_anchor(j, m), 0);
}

TEST(KAnchor, UniqueEvenWindowExhaustive) {
  for (int N = 0; N <= 8; ++N)
    for (int j = 0; j < std::max(N, 1); ++j)
      for (std::int64_t m = 1; m <= (std::int64_t{1} << N); ++m) {
        const std::int64_t half = std::int64_t{1} << j;
        int count = 0;
        std::int64_t found = -1;
        for (std::int64_t k = 0; k * half < (std::int64_t{1} << N) + 2 * half; k += 2)
          if (k * half < m && m <= (k + 2) * half) {
            ++count;
            found = k;
          }
        ASSERT_EQ(count, 1);
        EXPECT_EQ(k_anchor(j, m), found);
      }
}

TEST(CenteredAnchor, Window) {
  for (int i = 0; i < 8; ++i)
    for (std::int64_t m = 1; m <= 256; ++m) {
      const std::int64_t l = centered_anchor(i, m);
      const std::int64_t half = std::int64_t{1} << i;
      EXPECT_EQ(l % 2, 0);
      EXPECT_LT((l - 1) * half, m);
      EXPECT_LE(m, (l + 1) * half);
    }
  // the two windows disagree, e.g. m = 3 at level 1
  EXPECT_EQ(k_anchor(1, 3), 0);
  EXPECT_EQ(centered_anchor(1, 3), 2);
}

TEST(HaarExpand, Examples) {
  const GridSpec g = make_grid(256);
  const HaarExpansion full = haar_expand(256, 0, g);
  for (int j = 0; j < 8; ++j) EXPECT_EQ(full.coeff(j).num, 0);
  EXPECT_EQ(full.residual.value(), 1.0);
  const HaarExpansion half = haar_expand(128, 0, g);
  for (int j = 0; j < 7; ++j) EXPECT_EQ(half.coeff(j).num, 0);
  EXPECT_EQ(half.coeff(7).value(), 0.5);
  EXPECT_THROW(haar_expand(12, 3, g), AlignmentError);
  EXPECT_THROW(haar_expand(0, 0, g), InvalidParameter);
}

TEST(HaarExpand, ExactReconstructionExhaustive) {
  for (int N = 0; N <= 8; ++N) {
    const GridSpec g = make_grid(std::int64_t{1} << N);
    for (int base = 0; base <= N; ++base)
      for (std::int64_t m = std::int64_t{1} << base; m <= g.side(); m += std::int64_t{1} << base) {
        const HaarExpansion h = haar_expand(m, base, g);
        const auto v = haar_reconstruct_scaled(h);
        for (std::int64_t x = 0; x < g.side(); ++x)
          ASSERT_EQ(v[x], x < m ? (std::int64_t{2} << N) : 0) << N << " " << base << " " << m << " " << x;
      }
  }
}

TEST(HaarExpand, CoefficientBounds) {
  const GridSpec g = make_grid(4096);
  const ScaleParams p = make_scale_params(g, 0.6, 0.9, 3, 10);
  for (std::int64_t u = 1; (u << p.Astar) <= static_cast<std::int64_t>(g.n * p.a); ++u) {
    const HaarExpansion h = haar_expand(u << p.Astar, p.Astar, g);
    for (int j = p.Astar; j < g.N; ++j) {
      const double c = h.coeff(j).value();
      EXPECT_GE(c, 0.0);
      EXPECT_LE(c, 0.5);
      if (j >= p.A) { EXPECT_LE(c, std::ldexp(1.0, p.A) / std::ldexp(1.0, j + 1)); }
    }
  }
}

TEST(PrefixSum, Examples) {
  Grid<int> z = Grid<int>::Zero(3, 5);
  EXPECT_TRUE((prefix_sum_2d(z) == 0).all());
  z(0, 0) = 1;
  EXPECT_TRUE((prefix_sum_2d(z) == 1).all());
  std::mt19937 rng(5);
  Grid<int> r(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = std::uniform_int_distribution<int>(-9, 9)(rng);
  const Grid<std::int64_t> out = prefix_sum_2d(r);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      std::int64_t s = 0;
      for (int a = 0; a <= i; ++a)
        for (int b = 0; b <= j; ++b) s += r(a, b);
      EXPECT_EQ(out(i, j), s);
    }
  Grid<double> d = r.cast<double>() * 0.5;
  const Grid<double> outd = prefix_sum_2d(d);
  EXPECT_DOUBLE_EQ(outd(3, 3), 0.5 * static_cast<double>(out(3, 3)));
}

TEST(PrefixSum, Overflow) {
  Grid<std::int64_t> big(2, 2);
  big.setConstant(std::numeric_limits<std::int64_t>::max() / 2);
  EXPECT_THROW(prefix_sum_2d(big), OverflowError);
}
