#ifndef ADVLANE_EVAL_H_
#define ADVLANE_EVAL_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "advlane/env.h"
#include "advlane/policy.h"
#include "advlane/rollout.h"
#include "advlane/trainers.h"

namespace advlane {

// Heavy-tailed disturbance test. A Pareto(beta, x_m) draw x is mapped to the
// magnitude fraction x_m / x in (0, 1], so larger beta pushes disturbances
// towards the boundary of the +-20% box.
struct ParetoConfig {
  double x_m = 1.0;
  double sign_flip_prob = 0.5;
  // Fraction of the actuator maximum that a unit magnitude corresponds to.
  double magnitude_scale = kDisturbanceFraction;
  std::vector<double> beta_list = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

  void Validate() const;
  bool operator==(const ParetoConfig&) const = default;
};

struct AxleRange {
  double low = 0.5;
  double high = 2.5;
};

struct EvalOptions {
  std::string policy_id = "policy";
  int n_rollouts = 100;
  std::uint64_t seed = 1;
  int workers = 1;
  // The protagonist under test acts with its mean when true.
  bool deterministic = true;
};

struct EvalReport {
  std::string policy_id;
  std::string test_id;
  std::string param;  // beta, checkpoint iteration, or "n.a."
  int n_rollouts = 0;
  double mean_reward = 0.0;
  double stderr_reward = 0.0;
  double failure_rate = 0.0;
  std::uint64_t seed = 0;
};

struct MetricSummary {
  int n = 0;
  double mean_reward = 0.0;    // undiscounted protagonist return, collision terms removed
  double stderr_reward = 0.0;  // standard error of the per-episode value
  double failure_rate = 0.0;
};

// Throws InvalidInput on an empty batch.
MetricSummary ComputeMetrics(const std::vector<Trajectory>& trajs);

// x_m * u^(-1/beta); `u` must lie in (0, 1].
double ParetoFromUniform(double u, double beta, double x_m);
double SamplePareto(double beta, double x_m, Rng& rng);
Disturbance ParetoDisturbance(double beta, const ParetoConfig& pc, Rng& rng);

class ParetoDisturbanceActor : public Actor {
 public:
  ParetoDisturbanceActor(double beta, const ParetoConfig& pc) : beta_(beta), pc_(pc) {}
  int action_dim() const override { return 2; }
  ActionSample Act(std::span<const double> obs, Rng& rng) const override;

 private:
  double beta_;
  ParetoConfig pc_;
};

// Independent uniform draws over the full disturbance box.
class UniformDisturbanceActor : public Actor {
 public:
  int action_dim() const override { return 2; }
  ActionSample Act(std::span<const double> obs, Rng& rng) const override;
};

VehicleParams SampleAxles(const VehicleParams& base, const AxleRange& range, Rng& rng);

// Runs `n` episodes; episode k uses EpisodeStreams(seed, k). `configure`, when
// set, may adjust the bundle per episode using the episode's extra stream.
using EpisodeConfigurator = std::function<void(EnvBundle&, Rng&)>;
std::vector<Trajectory> EvaluateEpisodes(const EnvBundle& bundle, const Actor& protagonist,
                                         const Actor& adversary, int n, std::uint64_t seed,
                                         int workers,
                                         const EpisodeConfigurator& configure = nullptr);

EvalReport RunCleanTest(const GaussianPolicy& policy, const EnvBundle& bundle,
                        const EvalOptions& opts);

std::vector<EvalReport> RunParetoTest(const GaussianPolicy& policy,
                                      const std::vector<double>& beta_list,
                                      const ParetoConfig& pc, const EnvBundle& bundle,
                                      const EvalOptions& opts);

// Evaluates the frozen protagonist against every adversary checkpoint; the
// adversaries sample from their Gaussians.
std::vector<EvalReport> RunAdversarialTest(const GaussianPolicy& protagonist,
                                           const std::vector<PolicyCheckpoint>& adversaries,
                                           const EnvBundle& bundle, const EvalOptions& opts);

inline constexpr double kLscSteerRateLimit = DegToRad(4.5);

// Limited steer change plus uniform disturbance.
EvalReport RunLscTest(const GaussianPolicy& policy, const EnvBundle& bundle,
                      const EvalOptions& opts, double steer_rate_limit = kLscSteerRateLimit);

// Per-episode random axle distances plus uniform disturbance.
EvalReport RunAxleTest(const GaussianPolicy& policy, const EnvBundle& bundle,
                       const EvalOptions& opts, const AxleRange& range = {});

// Protagonist under uniform disturbance only; the reference for the axle test.
EvalReport RunUniformDisturbanceTest(const GaussianPolicy& policy, const EnvBundle& bundle,
                                     const EvalOptions& opts);

}  // namespace advlane

#endif  // ADVLANE_EVAL_H_
