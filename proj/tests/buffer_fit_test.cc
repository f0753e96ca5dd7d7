#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "advlane/fit.h"
#include "advlane/reservoir.h"

namespace advlane {
namespace {

TEST(Reservoir, BelowCapacityKeepsEverything) {
  ReservoirBuffer<char> buf(2);
  Rng rng(1);
  buf.Insert('a', rng);
  buf.Insert('b', rng);
  EXPECT_EQ(buf.items(), (std::vector<char>{'a', 'b'}));
  EXPECT_EQ(buf.seen(), 2u);
}

TEST(Reservoir, SizeIsMinOfSeenAndCapacity) {
  ReservoirBuffer<int> buf(5);
  Rng rng(2);
  for (int i = 0; i < 17; ++i) {
    buf.Insert(i, rng);
    EXPECT_EQ(buf.size(), std::min<std::size_t>(i + 1, 5));
    EXPECT_EQ(buf.seen(), static_cast<std::uint64_t>(i + 1));
  }
}

TEST(Reservoir, CapacityOneRetentionIsUniform) {
  const int n = 10;
  const int trials = 10000;
  std::vector<int> kept(n, 0);
  Rng rng(3);
  for (int t = 0; t < trials; ++t) {
    ReservoirBuffer<int> buf(1);
    for (int i = 0; i < n; ++i) buf.Insert(i, rng);
    ++kept[buf.items()[0]];
  }
  for (int c : kept) EXPECT_NEAR(static_cast<double>(c) / trials, 1.0 / n, 0.02);
}

TEST(Reservoir, SmallCapacityRetentionProbability) {
  const int n = 20;
  const int cap = 4;
  const int trials = 20000;
  std::vector<int> kept(n, 0);
  Rng rng(4);
  for (int t = 0; t < trials; ++t) {
    ReservoirBuffer<int> buf(cap);
    for (int i = 0; i < n; ++i) buf.Insert(i, rng);
    for (int v : buf.items()) ++kept[v];
  }
  for (int c : kept) EXPECT_NEAR(static_cast<double>(c) / trials, static_cast<double>(cap) / n, 0.02);
}

TEST(Reservoir, ZeroCapacityRejected) {
  EXPECT_THROW(ReservoirBuffer<int>(0), InvalidInput);
}

GaussianPolicy FitPolicy(std::uint64_t seed) {
  Rng rng(seed);
  return GaussianPolicy::Random({2, {8}, 1}, {-5.0}, {5.0}, rng);
}

TEST(Fit, RepeatedPairConvergesToAction) {
  ExperienceBuffer buf(100);
  Rng rng(5);
  for (int i = 0; i < 64; ++i) buf.Insert({{0.5, -0.5}, {1.3}}, rng);
  FitConfig cfg;
  cfg.epochs = 300;
  cfg.learning_rate = 1e-2;
  const GaussianPolicy fitted = FitAveragePolicy(FitPolicy(6), buf, cfg, rng);
  const std::vector<double> obs = {0.5, -0.5};
  EXPECT_NEAR(fitted.Mean(obs)(0), 1.3, 0.05);
}

TEST(Fit, RecoversStandardDeviation) {
  ExperienceBuffer buf(5000);
  Rng rng(7);
  std::normal_distribution<double> draw(0.5, 0.8);
  for (int i = 0; i < 4000; ++i) buf.Insert({{1.0, 0.0}, {draw(rng)}}, rng);
  FitConfig cfg;
  cfg.epochs = 60;
  cfg.learning_rate = 1e-2;
  cfg.batch_size = 256;
  const GaussianPolicy fitted = FitAveragePolicy(FitPolicy(8), buf, cfg, rng);
  EXPECT_NEAR(fitted.Std()(0), 0.8, 0.08);
}

TEST(Fit, LossNeverIncreases) {
  ExperienceBuffer buf(500);
  Rng rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double a = u(rng), b = u(rng);
    buf.Insert({{a, b}, {2.0 * a - b + 0.1 * u(rng)}}, rng);
  }
  FitConfig cfg;
  cfg.epochs = 40;
  cfg.learning_rate = 5e-2;
  std::vector<double> losses;
  FitAveragePolicy(FitPolicy(10), buf, cfg, rng, &losses);
  ASSERT_EQ(losses.size(), 41u);
  for (std::size_t i = 1; i < losses.size(); ++i) EXPECT_LE(losses[i], losses[i - 1] + 1e-6);
  EXPECT_LT(losses.back(), losses.front());
}

TEST(Fit, ZeroEpochsLeavesPolicyUnchanged) {
  ExperienceBuffer buf(10);
  Rng rng(11);
  buf.Insert({{0.0, 0.0}, {1.0}}, rng);
  FitConfig cfg;
  cfg.epochs = 0;
  const GaussianPolicy p = FitPolicy(12);
  EXPECT_EQ(FitAveragePolicy(p, buf, cfg, rng).ParameterHash(), p.ParameterHash());
}

TEST(Fit, EmptyBufferRejected) {
  ExperienceBuffer buf(10);
  Rng rng(13);
  EXPECT_THROW(FitAveragePolicy(FitPolicy(14), buf, FitConfig{}, rng), InvalidInput);
}

TEST(Fit, MeanOnlyKeepsStd) {
  ExperienceBuffer buf(50);
  Rng rng(15);
  for (int i = 0; i < 50; ++i) buf.Insert({{0.1, 0.2}, {2.0}}, rng);
  FitConfig cfg;
  cfg.fit_std = false;
  const GaussianPolicy p = FitPolicy(16);
  EXPECT_EQ(FitAveragePolicy(p, buf, cfg, rng).log_std(), p.log_std());
}

}  // namespace
}  // namespace advlane
