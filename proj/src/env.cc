#include "advlane/env.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace advlane {

double EnvConfig::LaneCenter(int lane) const {
  return (lane - 0.5 * (num_lanes - 1)) * lane_width;
}

void EnvConfig::Validate() const {
  if (!(lane_width > 0.0)) throw InvalidInput("env.lane_width must be > 0");
  if (num_lanes < 1) throw InvalidInput("env.num_lanes must be >= 1");
  if (!(init_speed >= 0.0)) throw InvalidInput("env.init_speed must be >= 0");
  if (!(dt > 0.0)) throw InvalidInput("env.dt must be > 0");
  if (max_steps < 1) throw InvalidInput("env.max_steps must be >= 1");
  if (!(v_max > v_min)) throw InvalidInput("env.v_max must exceed env.v_min");
  if (!((v_max - v_min) / 2.0 > 1.0)) {
    throw InvalidInput(
        "env.v_max/env.v_min: velocity reward log base (v_max - v_min)/2 must be > 1");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidInput("env.gamma must lie in [0, 1)");
}

void AdversaryRewardConfig::Validate() const {
  if (!(r_a >= 0.0)) throw InvalidInput("adversary.r_a must be >= 0");
  if (!(d_accel_max > 0.0)) throw InvalidInput("adversary.d_accel_max must be > 0");
  if (!(d_steer_max > 0.0)) throw InvalidInput("adversary.d_steer_max must be > 0");
}

void EnvBundle::Validate() const {
  env.Validate();
  adversary.Validate();
  vehicle.Validate();
  if (std::abs(vehicle.dt - env.dt) > 1e-12) {
    throw InvalidInput("vehicle.dt must equal env.dt");
  }
}

GameState Reset(const EnvConfig& cfg, Rng& rng) {
  GameState g;
  g.vehicle = {0.0, cfg.LaneCenter(cfg.CenterLane()), cfg.init_speed, 0.0};
  g.target_lane = std::uniform_int_distribution<int>(0, cfg.num_lanes - 1)(rng);
  return g;
}

double RewardVelocity(double v, const EnvConfig& cfg) {
  const double span = cfg.v_max - cfg.v_min;
  const double base = span / 2.0;
  if (!(base > 1.0)) throw InvalidInput("velocity reward log base must be > 1");
  const double vc = std::clamp(v, cfg.v_min, cfg.v_max);
  return std::log(100.0 * (vc - cfg.v_min) / span + 0.99) / std::log(base) - 1.0;
}

double RewardHeading(double theta) {
  return std::abs(theta) > std::numbers::pi / 4.0 ? -1.0 : 0.0;
}

std::pair<double, double> RewardActuation(double alpha, double phi) {
  return {-std::abs(alpha) / kMaxAccel, -std::abs(phi) / kMaxSteer};
}

double RewardLateral(double y, double y_goal, const EnvConfig& cfg) {
  const double off = std::abs(y - y_goal);
  return off < 0.05 ? 3.0 : 1.0 - off / cfg.lane_width;
}

bool IsOffRoad(const VehicleState& s, const EnvConfig& cfg) {
  return std::abs(s.y) > cfg.RoadHalfWidth();
}

double ProtagonistReward(const VehicleState& s, const ControlInput& a1,
                         const GameState& g, const EnvConfig& cfg) {
  if (IsOffRoad(s, cfg)) return cfg.collision_reward;
  const auto [r_alpha, r_phi] = RewardActuation(a1.accel, a1.steer);
  const RewardWeights& w = cfg.weights;
  return w.velocity * RewardVelocity(s.v, cfg) + w.heading * RewardHeading(s.theta) +
         w.accel * r_alpha + w.steer * r_phi +
         w.lateral * RewardLateral(s.y, cfg.LaneCenter(g.target_lane), cfg);
}

double CooperativeReward(const Disturbance& d, const AdversaryRewardConfig& arc) {
  double r = 0.0;
  if (std::abs(d.d_accel) < arc.d_accel_max) r += arc.r_a;
  if (std::abs(d.d_steer) < arc.d_steer_max) r += arc.r_a;
  return r;
}

double AdversaryReward(double r1, const Disturbance& d, const AdversaryRewardConfig& arc) {
  if (arc.mode == AdversaryMode::kZeroSum) return -r1;
  return -r1 + CooperativeReward(d, arc);
}

StepResult Step(const GameState& g, const ControlInput& a1, const Disturbance& a2,
                const EnvBundle& bundle) {
  const EnvConfig& cfg = bundle.env;
  if (g.terminal || g.step >= cfg.max_steps) {
    throw ContractViolation("Step called on a terminal game state");
  }
  const ControlInput a1_box{std::clamp(a1.accel, -kMaxAccel, kMaxAccel),
                            std::clamp(a1.steer, -kMaxSteer, kMaxSteer)};
  ControlInput cmd = a1_box;
  if (bundle.vehicle.steer_rate_limit) {
    cmd.steer = ApplySteerRateLimit(g.prev_steer, cmd.steer, *bundle.vehicle.steer_rate_limit);
  }
  const ControlInput u_eff = ClipInputs(cmd, a2);

  StepResult out;
  out.next = g;
  out.next.vehicle = StepBicycle(g.vehicle, u_eff, bundle.vehicle);
  out.next.prev_steer = cmd.steer;
  out.next.step = g.step + 1;

  out.failure = IsOffRoad(out.next.vehicle, cfg);
  out.r1 = ProtagonistReward(out.next.vehicle, a1_box, g, cfg);
  out.r2 = AdversaryReward(out.r1, a2, bundle.adversary);
  out.terminal = out.failure || out.next.step >= cfg.max_steps;
  out.next.terminal = out.terminal;
  return out;
}

Observation Observe(const GameState& g, const EnvConfig& cfg) {
  return {g.vehicle.y - cfg.LaneCenter(g.target_lane), g.vehicle.v, g.vehicle.theta,
          g.prev_steer};
}

}  // namespace advlane
