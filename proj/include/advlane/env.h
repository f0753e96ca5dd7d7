#ifndef ADVLANE_ENV_H_
#define ADVLANE_ENV_H_

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "advlane/dynamics.h"

namespace advlane {

using Rng = std::mt19937_64;

struct RewardWeights {
  double velocity = 0.5;
  double heading = 0.5;
  double accel = 0.1;
  double steer = 0.2;
  double lateral = 1.0;

  bool operator==(const RewardWeights&) const = default;
};

struct EnvConfig {
  double lane_width = 3.0;
  int num_lanes = 3;
  double init_speed = 10.0;
  double dt = 0.05;
  int max_steps = 200;
  double v_min = 0.0;
  double v_max = 20.0;
  RewardWeights weights;
  double collision_reward = -5.0;
  double gamma = 0.99;

  // Lateral coordinate of the center line of `lane`. Lane 0 is the rightmost
  // lane; y grows to the left and the road centerline is y = 0.
  double LaneCenter(int lane) const;
  double RoadHalfWidth() const { return 0.5 * num_lanes * lane_width; }
  int CenterLane() const { return num_lanes / 2; }

  // Throws InvalidInput naming the offending key.
  void Validate() const;

  bool operator==(const EnvConfig&) const = default;
};

enum class AdversaryMode { kZeroSum, kSemiCompetitive };

struct AdversaryRewardConfig {
  AdversaryMode mode = AdversaryMode::kSemiCompetitive;
  double r_a = 3.0;
  double d_accel_max = kMaxDisturbAccel;
  double d_steer_max = kMaxDisturbSteer;

  void Validate() const;

  bool operator==(const AdversaryRewardConfig&) const = default;
};

// Everything needed to simulate one episode.
struct EnvBundle {
  EnvConfig env;
  AdversaryRewardConfig adversary;
  VehicleParams vehicle;

  void Validate() const;
};

struct GameState {
  VehicleState vehicle;
  int target_lane = 0;
  double prev_steer = 0.0;
  int step = 0;
  bool terminal = false;
};

struct StepResult {
  GameState next;
  double r1 = 0.0;
  double r2 = 0.0;
  bool terminal = false;
  bool failure = false;
};

// Thrown when the caller breaks an operation precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

GameState Reset(const EnvConfig& cfg, Rng& rng);

// Reward terms. All piecewise cases use strict inequalities.
double RewardVelocity(double v, const EnvConfig& cfg);
double RewardHeading(double theta);
std::pair<double, double> RewardActuation(double alpha, double phi);
double RewardLateral(double y, double y_goal, const EnvConfig& cfg);

bool IsOffRoad(const VehicleState& s, const EnvConfig& cfg);

// Weighted sum of the five terms, or the collision reward when off road.
double ProtagonistReward(const VehicleState& s, const ControlInput& a1,
                         const GameState& g, const EnvConfig& cfg);

double CooperativeReward(const Disturbance& d, const AdversaryRewardConfig& arc);
double AdversaryReward(double r1, const Disturbance& d,
                       const AdversaryRewardConfig& arc);

// Advances the game one step. The protagonist's command is first rate
// limited (when configured), then disturbed and clipped. Rewards are
// evaluated on the resulting vehicle state. Throws ContractViolation when `g`
// is terminal.
StepResult Step(const GameState& g, const ControlInput& a1, const Disturbance& a2,
                const EnvBundle& bundle);

inline constexpr int kObservationDim = 4;
using Observation = std::array<double, kObservationDim>;

// [y - y_goal, v, theta, prev_steer]; both players receive the same vector.
// A target lane to the left of the vehicle gives a negative first component.
Observation Observe(const GameState& g, const EnvConfig& cfg);

}  // namespace advlane

#endif  // ADVLANE_ENV_H_
