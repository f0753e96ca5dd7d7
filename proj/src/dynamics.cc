#include "advlane/dynamics.h"

#include <algorithm>
#include <cmath>

namespace advlane {
namespace {

void RequireFinite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw InvalidInput(std::string("non-finite value for ") + what);
  }
}

}  // namespace

void VehicleParams::Validate() const {
  if (!(l_a > 0.0) || !std::isfinite(l_a)) throw InvalidInput("vehicle.l_a must be > 0");
  if (!(l_b > 0.0) || !std::isfinite(l_b)) throw InvalidInput("vehicle.l_b must be > 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("vehicle.dt must be > 0");
  if (steer_rate_limit && !(*steer_rate_limit > 0.0)) {
    throw InvalidInput("vehicle.steer_rate_limit must be > 0 when set");
  }
}

ControlInput ClipInputs(const ControlInput& u, const Disturbance& d) {
  RequireFinite(u.accel, "accel");
  RequireFinite(u.steer, "steer");
  RequireFinite(d.d_accel, "d_accel");
  RequireFinite(d.d_steer, "d_steer");
  const double da = std::clamp(d.d_accel, -kMaxDisturbAccel, kMaxDisturbAccel);
  const double ds = std::clamp(d.d_steer, -kMaxDisturbSteer, kMaxDisturbSteer);
  return {std::clamp(u.accel + da, -kMaxAccel, kMaxAccel),
          std::clamp(u.steer + ds, -kMaxSteer, kMaxSteer)};
}

double WrapAngle(double a) {
  constexpr double kPi = std::numbers::pi;
  if (a > -kPi && a <= kPi) return a;
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

VehicleState StepBicycle(const VehicleState& s, const ControlInput& u_eff,
                         const VehicleParams& p) {
  RequireFinite(s.x, "x");
  RequireFinite(s.y, "y");
  RequireFinite(s.v, "v");
  RequireFinite(s.theta, "theta");
  RequireFinite(u_eff.accel, "accel");
  RequireFinite(u_eff.steer, "steer");

  const double slip = std::atan(p.l_b / (p.l_a + p.l_b) * std::tan(u_eff.steer));
  VehicleState next;
  next.x = s.x + s.v * std::cos(s.theta + slip) * p.dt;
  next.y = s.y + s.v * std::sin(s.theta + slip) * p.dt;
  next.theta = WrapAngle(s.theta + s.v / p.l_b * std::sin(slip) * p.dt);
  next.v = std::max(0.0, s.v + u_eff.accel * p.dt);
  return next;
}

double ApplySteerRateLimit(double prev_steer, double cmd_steer, double limit) {
  return prev_steer + std::clamp(cmd_steer - prev_steer, -limit, limit);
}

}  // namespace advlane
