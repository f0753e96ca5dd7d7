#include "advlane/dynamics.h"

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

namespace advlane {
namespace {

constexpr double kTol = 1e-12;

VehicleParams Default() { return VehicleParams{}; }

TEST(ClipInputs, IdentityForZeroInputs) {
  EXPECT_EQ(ClipInputs({0.0, 0.0}, {0.0, 0.0}), (ControlInput{0.0, 0.0}));
}

TEST(ClipInputs, SumClampedToActuatorLimit) {
  const ControlInput u = ClipInputs({3.0, 0.0}, {0.6, 0.0});
  EXPECT_DOUBLE_EQ(u.accel, 3.0);
  EXPECT_DOUBLE_EQ(u.steer, 0.0);
}

TEST(ClipInputs, AddsDisturbance) {
  const ControlInput u = ClipInputs({2.0, DegToRad(10.0)}, {0.3, DegToRad(-4.0)});
  EXPECT_NEAR(u.accel, 2.3, kTol);
  EXPECT_NEAR(u.steer, DegToRad(6.0), kTol);
}

TEST(ClipInputs, DisturbanceLimitedToTwentyPercent) {
  const ControlInput u = ClipInputs({0.0, 0.0}, {5.0, -1.0});
  EXPECT_DOUBLE_EQ(u.accel, kMaxDisturbAccel);
  EXPECT_DOUBLE_EQ(u.steer, -kMaxDisturbSteer);
}

TEST(ClipInputs, Idempotent) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> a(-10.0, 10.0);
  std::uniform_real_distribution<double> s(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const ControlInput once = ClipInputs({a(rng), s(rng)}, {a(rng), s(rng)});
    EXPECT_EQ(ClipInputs(once, {0.0, 0.0}), once);
    EXPECT_LE(std::abs(once.accel), kMaxAccel);
    EXPECT_LE(std::abs(once.steer), kMaxSteer);
  }
}

TEST(ClipInputs, RejectsNonFinite) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(ClipInputs({nan, 0.0}, {0.0, 0.0}), InvalidInput);
  EXPECT_THROW(ClipInputs({0.0, 0.0}, {0.0, std::numeric_limits<double>::infinity()}),
               InvalidInput);
}

TEST(StepBicycle, StraightLine) {
  const VehicleState s = StepBicycle({0.0, 0.0, 10.0, 0.0}, {0.0, 0.0}, Default());
  EXPECT_NEAR(s.x, 0.5, kTol);
  EXPECT_NEAR(s.y, 0.0, kTol);
  EXPECT_NEAR(s.v, 10.0, kTol);
  EXPECT_NEAR(s.theta, 0.0, kTol);
}

TEST(StepBicycle, TwentyDegreeSteerMatchesHandDerivation) {
  const VehicleState s = StepBicycle({0.0, 0.0, 10.0, 0.0}, {0.0, DegToRad(20.0)}, Default());
  EXPECT_NEAR(s.x, 0.4919204957, 1e-9);
  EXPECT_NEAR(s.y, 0.0895222090, 1e-9);
  EXPECT_NEAR(s.theta, 0.0596814727, 1e-9);
  EXPECT_NEAR(s.v, 10.0, kTol);
}

TEST(StepBicycle, AccelerationUsesStartOfStepSpeedForPosition) {
  const VehicleState s = StepBicycle({0.0, 0.0, 10.0, 0.0}, {3.0, 0.0}, Default());
  EXPECT_NEAR(s.x, 0.5, kTol);
  EXPECT_NEAR(s.v, 10.15, kTol);
}

TEST(StepBicycle, MirrorSymmetry) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> steer(-kMaxSteer, kMaxSteer);
  std::uniform_real_distribution<double> acc(-kMaxAccel, kMaxAccel);
  for (int i = 0; i < 200; ++i) {
    const VehicleState s0{1.0, 0.0, 8.0, 0.0};
    const double st = steer(rng);
    const double ac = acc(rng);
    const Disturbance d{0.1, DegToRad(2.0)};
    const VehicleState a = StepBicycle(s0, ClipInputs({ac, st}, d), Default());
    const VehicleState b =
        StepBicycle(s0, ClipInputs({ac, -st}, {d.d_accel, -d.d_steer}), Default());
    EXPECT_NEAR(a.y, -b.y, kTol);
    EXPECT_NEAR(a.theta, -b.theta, kTol);
    EXPECT_NEAR(a.x, b.x, kTol);
    EXPECT_NEAR(a.v, b.v, kTol);
  }
}

TEST(StepBicycle, ZeroInputKeepsHeadingAndSpeed) {
  VehicleState s{0.0, 0.7, 12.0, 0.3};
  for (int k = 0; k < 500; ++k) {
    const VehicleState n = StepBicycle(s, {0.0, 0.0}, Default());
    EXPECT_EQ(n.theta, s.theta);
    EXPECT_EQ(n.v, s.v);
    EXPECT_NEAR(n.x - s.x, s.v * std::cos(s.theta) * 0.05, 1e-12);
    s = n;
  }
}

TEST(StepBicycle, SpeedNeverNegative) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> acc(-kMaxAccel, kMaxAccel);
  std::uniform_real_distribution<double> st(-kMaxSteer, kMaxSteer);
  VehicleState s{0.0, 0.0, 0.5, 0.0};
  for (int k = 0; k < 10000; ++k) {
    s = StepBicycle(s, ClipInputs({acc(rng) - 1.0, st(rng)}, {}), Default());
    ASSERT_GE(s.v, 0.0);
  }
}

TEST(StepBicycle, HeadingWrapped) {
  VehicleState s{0.0, 0.0, 20.0, 3.1};
  for (int k = 0; k < 400; ++k) {
    s = StepBicycle(s, {0.0, kMaxSteer}, Default());
    ASSERT_GT(s.theta, -std::numbers::pi);
    ASSERT_LE(s.theta, std::numbers::pi);
  }
}

TEST(WrapAngle, HalfOpenInterval) {
  EXPECT_NEAR(WrapAngle(std::numbers::pi), std::numbers::pi, kTol);
  EXPECT_NEAR(WrapAngle(-std::numbers::pi), std::numbers::pi, kTol);
  EXPECT_NEAR(WrapAngle(3.0 * std::numbers::pi / 2.0), -std::numbers::pi / 2.0, kTol);
  EXPECT_NEAR(WrapAngle(0.25), 0.25, kTol);
}

TEST(SteerRateLimit, Examples) {
  const double lim = DegToRad(4.5);
  EXPECT_NEAR(ApplySteerRateLimit(0.0, DegToRad(20.0), lim), DegToRad(4.5), kTol);
  EXPECT_NEAR(ApplySteerRateLimit(0.0, DegToRad(3.0), lim), DegToRad(3.0), kTol);
  EXPECT_NEAR(ApplySteerRateLimit(DegToRad(10.0), DegToRad(-10.0), lim), DegToRad(5.5), kTol);
}

TEST(SteerRateLimit, NeverExceedsLimitOverRandomSequences) {
  const double lim = DegToRad(4.5);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> cmd(-kMaxSteer, kMaxSteer);
  double prev = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double applied = ApplySteerRateLimit(prev, cmd(rng), lim);
    ASSERT_LE(std::abs(applied - prev), lim + 1e-15);
    prev = applied;
  }
}

TEST(VehicleParams, Validation) {
  VehicleParams p;
  EXPECT_NO_THROW(p.Validate());
  p.l_a = 0.0;
  EXPECT_THROW(p.Validate(), InvalidInput);
  p = VehicleParams{};
  p.steer_rate_limit = -1.0;
  EXPECT_THROW(p.Validate(), InvalidInput);
}

}  // namespace
}  // namespace advlane
