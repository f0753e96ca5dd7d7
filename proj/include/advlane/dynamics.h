#ifndef ADVLANE_DYNAMICS_H_
#define ADVLANE_DYNAMICS_H_

#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace advlane {

// Thrown when a numerical input is NaN/inf or a parameter set is invalid.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

constexpr double DegToRad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double RadToDeg(double rad) { return rad * 180.0 / std::numbers::pi; }

// Physical actuator limits of the ego vehicle.
inline constexpr double kMaxAccel = 3.0;                // m/s^2
inline constexpr double kMaxSteer = DegToRad(20.0);     // rad
// The adversary may perturb each channel by up to 20% of its maximum.
inline constexpr double kDisturbanceFraction = 0.2;
// Written out rather than multiplied so that 0.6 and 4 degrees compare equal to
// the limits (0.2 * 3.0 rounds to 0.6000000000000001).
inline constexpr double kMaxDisturbAccel = 0.6;             // m/s^2
inline constexpr double kMaxDisturbSteer = DegToRad(4.0);   // rad

struct VehicleState {
  double x = 0.0;      // m, longitudinal
  double y = 0.0;      // m, lateral (positive to the left)
  double v = 0.0;      // m/s
  double theta = 0.0;  // rad

  bool operator==(const VehicleState&) const = default;
};

struct ControlInput {
  double accel = 0.0;  // m/s^2
  double steer = 0.0;  // rad

  bool operator==(const ControlInput&) const = default;
};

struct Disturbance {
  double d_accel = 0.0;  // m/s^2
  double d_steer = 0.0;  // rad

  bool operator==(const Disturbance&) const = default;
};

struct VehicleParams {
  double l_a = 1.5;   // center of mass to front axle, m
  double l_b = 1.5;   // center of mass to rear axle, m
  double dt = 0.05;   // s
  // Maximum change of the applied steering angle per step, rad.
  std::optional<double> steer_rate_limit;

  // Throws InvalidInput naming the offending field.
  void Validate() const;

  bool operator==(const VehicleParams&) const = default;
};

// Adds the disturbance to the command, each channel of `d` clamped first to
// its own limit, then the sum clamped to the actuator limits.
ControlInput ClipInputs(const ControlInput& u, const Disturbance& d);

// One forward-Euler step of the kinematic bicycle model. `u_eff` must already
// be clipped. Heading is wrapped to (-pi, pi]; speed never goes negative.
VehicleState StepBicycle(const VehicleState& s, const ControlInput& u_eff,
                         const VehicleParams& p);

// prev + clamp(cmd - prev, -limit, limit).
double ApplySteerRateLimit(double prev_steer, double cmd_steer, double limit);

// Wraps an angle into (-pi, pi].
double WrapAngle(double a);

}  // namespace advlane

#endif  // ADVLANE_DYNAMICS_H_
