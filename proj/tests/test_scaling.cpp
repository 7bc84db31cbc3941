#include <gtest/gtest.h>

#include <cmath>

#include "hc/errors.hpp"
#include "hc/scaling.hpp"

using namespace hc;

namespace {

ScalingRow synthetic(std::int64_t n, double median, double se) {
  ScalingRow r;
  r.n = n;
  r.levels = {0.5};
  r.quantiles = {{median, se}};
  return r;
}

}  // namespace

TEST(Scaling, SmallRun) {
  ScalingConfig cfg;
  cfg.ns = {1, 16, 64};
  cfg.reps = 40;
  cfg.levels = {0.9, 0.5};
  const std::vector<ScalingRow> rows = run_scaling(cfg);
  ASSERT_EQ(rows.size(), 3u);
  for (const ScalingRow& r : rows) {
    EXPECT_EQ(r.levels, (std::vector<double>{0.5, 0.9}));
    EXPECT_LE(r.quantiles[0].value, r.quantiles[1].value);
    EXPECT_GE(r.quantiles[0].se, 0.0);
    EXPECT_TRUE(std::isfinite(r.mean));
    EXPECT_GE(r.stderr_mean, 0.0);
  }
  // n = 1: a single cell, and E vanishes at its four corners
  EXPECT_EQ(rows[0].N, 0);
  EXPECT_EQ(rows[0].mean, 0.0);
  EXPECT_GT(rows[2].stderr_mean, 0.0);
  EXPECT_EQ(run_scaling(cfg)[2].mean, rows[2].mean);
}

TEST(Scaling, Errors) {
  ScalingConfig cfg;
  cfg.ns = {std::int64_t{1} << 14};
  cfg.reps = 2;
  EXPECT_THROW(run_scaling(cfg), CapacityError);
  cfg.ns = {16};
  cfg.reps = 1;
  EXPECT_THROW(run_scaling(cfg), InvalidParameter);
  cfg.reps = 5;
  cfg.levels = {1.0};
  EXPECT_THROW(run_scaling(cfg), InvalidParameter);
}

TEST(Scaling, ExactFitOnPowerLaw) {
  std::vector<ScalingRow> rows;
  for (std::int64_t n : {256, 512, 1024, 2048, 4096})
    rows.push_back(synthetic(n, 3.0 * std::pow(std::log(double(n)), 1.5), 0.1));
  const ExponentFit fit = fit_exponent(rows, 0);
  ASSERT_TRUE(fit.ok);
  EXPECT_NEAR(fit.p, 1.5, 1e-10);
  EXPECT_NEAR(fit.log_c, std::log(3.0), 1e-9);
  EXPECT_NEAR(fit.p_se, 0.0, 1e-6);
  EXPECT_EQ(fit.points, 5u);
  const ScalingVerdict v = scaling_properties(rows, 0);
  EXPECT_TRUE(v.holds());
  const std::vector<RatioPoint> ratios = ratio_series(rows, 0);
  for (const RatioPoint& r : ratios) EXPECT_NEAR(r.ratio32, 3.0, 1e-12);
}

TEST(Scaling, InsufficientPoints) {
  const ExponentFit one = fit_exponent({synthetic(1024, 8.0, 0.2)}, 0);
  EXPECT_FALSE(one.ok);
  EXPECT_FALSE(one.note.empty());
  const ExponentFit degenerate = fit_exponent({synthetic(1, 1.0, 0.1), synthetic(2, 2.0, 0.1)}, 0);
  EXPECT_FALSE(degenerate.ok);
  EXPECT_FALSE(scaling_properties({synthetic(1024, 8.0, 0.2)}, 0).exponent_in_range);
}

TEST(Scaling, VerdictDetectsViolations) {
  // decreasing medians beyond 2 s.e.
  std::vector<ScalingRow> down{synthetic(256, 9.0, 0.1), synthetic(512, 7.0, 0.1), synthetic(1024, 8.0, 0.1)};
  EXPECT_FALSE(scaling_properties(down, 0).nondecreasing);
  // exponent 3 growth: ratio to (log n)^2 increases
  std::vector<ScalingRow> steep;
  for (std::int64_t n : {256, 1024, 4096}) steep.push_back(synthetic(n, std::pow(std::log(double(n)), 3.0), 0.01));
  const ScalingVerdict v = scaling_properties(steep, 0);
  EXPECT_FALSE(v.ratio2_nonincreasing);
  EXPECT_FALSE(v.exponent_in_range);
  EXPECT_NEAR(v.fit.p, 3.0, 1e-9);
}
