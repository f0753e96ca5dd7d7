#ifndef ADVLANE_TRAINERS_H_
#define ADVLANE_TRAINERS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "advlane/env.h"
#include "advlane/fit.h"
#include "advlane/optimizer.h"
#include "advlane/policy.h"
#include "advlane/reservoir.h"
#include "advlane/rollout.h"

namespace advlane {

struct TrainConfig {
  int n_iter = 300;
  int n1 = 5;  // protagonist updates per outer iteration
  int n2 = 5;  // adversary updates per outer iteration
  int batch_steps = 400;
  int baseline_warmstart_iters = 200;
  std::uint64_t seed = 1;
  int checkpoint_every = 10;
  std::vector<int> hidden = {64, 32};
  std::size_t reservoir_capacity = 20000;
  int workers = 1;
  // When false the wall_time_s column is written as 0 so logs are reproducible.
  bool record_wall_time = false;

  void Validate() const;
  bool operator==(const TrainConfig&) const = default;
};

// Identifies which of the trainer's policies is acting or being updated.
enum class PolicySlot {
  kProtagonist,         // RARL protagonist / NFSP protagonist best response
  kAdversary,           // RARL adversary / NFSP adversary best response
  kProtagonistAverage,  // NFSP only
  kAdversaryAverage,    // NFSP only
  kZero,                // disturbance-free opponent
};

const char* SlotName(PolicySlot slot);

struct MetricRow {
  int iteration = 0;
  Player player = Player::kProtagonist;
  double mean_reward = 0.0;  // mean undiscounted episode return of `player`
  double failure_rate = 0.0;
  double mean_abs_d_accel = 0.0;
  double mean_abs_d_steer = 0.0;
  double wall_time_s = 0.0;
};

struct PolicyCheckpoint {
  int iteration = 0;
  PolicySlot slot = PolicySlot::kProtagonist;
  GaussianPolicy policy;
};

struct TrainArtifacts {
  GaussianPolicy protagonist;  // best response for NFSP
  GaussianPolicy adversary;
  std::optional<GaussianPolicy> protagonist_average;
  std::optional<GaussianPolicy> adversary_average;
  std::vector<MetricRow> log;
  std::vector<PolicyCheckpoint> checkpoints;
};

// The four primitives the training procedures are written against. The
// simulation backend below is the real implementation; tests substitute
// instrumented stubs.
class TrainingBackend {
 public:
  virtual ~TrainingBackend() = default;
  virtual std::vector<Trajectory> Rollout(const Actor& protagonist, PolicySlot protagonist_slot,
                                          const Actor& adversary, PolicySlot adversary_slot) = 0;
  virtual void Optimize(GaussianPolicy& policy, PolicySlot slot,
                        const std::vector<Trajectory>& paths, Player player) = 0;
  virtual void Populate(ExperienceBuffer& buffer, const std::vector<Trajectory>& paths,
                        Player player) = 0;
  virtual GaussianPolicy Fit(const GaussianPolicy& average, PolicySlot slot,
                             const ExperienceBuffer& buffer) = 0;
};

class SimulationBackend : public TrainingBackend {
 public:
  SimulationBackend(const EnvBundle& bundle, const TrainConfig& train,
                    const OptimizerConfig& opt, const FitConfig& fit);

  std::vector<Trajectory> Rollout(const Actor& protagonist, PolicySlot protagonist_slot,
                                  const Actor& adversary, PolicySlot adversary_slot) override;
  void Optimize(GaussianPolicy& policy, PolicySlot slot, const std::vector<Trajectory>& paths,
                Player player) override;
  void Populate(ExperienceBuffer& buffer, const std::vector<Trajectory>& paths,
                Player player) override;
  GaussianPolicy Fit(const GaussianPolicy& average, PolicySlot slot,
                     const ExperienceBuffer& buffer) override;

  const EnvBundle& bundle() const { return bundle_; }

 private:
  EnvBundle bundle_;
  int batch_steps_;
  int workers_;
  OptimizerConfig opt_;
  FitConfig fit_;
  Rng rng_;
  // One optimizer (and its Adam state) per slot, persisted across phases.
  std::map<PolicySlot, PolicyOptimizer> optimizers_;
};

// Initial policies drawn from TrainConfig::seed.
GaussianPolicy InitialProtagonist(const TrainConfig& cfg);
GaussianPolicy InitialAdversary(const TrainConfig& cfg);

// Single-agent training against the zero disturbance.
TrainArtifacts TrainBaseline(const TrainConfig& cfg, TrainingBackend& backend,
                             GaussianPolicy protagonist);

// Alternating best responses: N1 protagonist updates against the frozen
// adversary, then N2 adversary updates against the frozen protagonist.
TrainArtifacts TrainRarl(const TrainConfig& cfg, TrainingBackend& backend,
                         GaussianPolicy protagonist, GaussianPolicy adversary);

// Each best response trains against the opponent's average policy; its
// rollouts populate the player's reservoir, to which the player's average
// policy is then fit.
TrainArtifacts TrainNfsp(const TrainConfig& cfg, TrainingBackend& backend,
                         GaussianPolicy protagonist_br, GaussianPolicy adversary_br,
                         GaussianPolicy protagonist_avg, GaussianPolicy adversary_avg);

// Convenience entry points using SimulationBackend and seeded initial
// policies. RARL and NFSP first pretrain the protagonist for
// baseline_warmstart_iters disturbance-free iterations unless `warm_start` is
// supplied.
TrainArtifacts TrainBaseline(const TrainConfig& cfg, const EnvBundle& bundle,
                             const OptimizerConfig& opt);
TrainArtifacts TrainRarl(const TrainConfig& cfg, const EnvBundle& bundle,
                         const OptimizerConfig& opt,
                         const std::optional<GaussianPolicy>& warm_start = std::nullopt);
TrainArtifacts TrainNfsp(const TrainConfig& cfg, const EnvBundle& bundle,
                         const OptimizerConfig& opt, const FitConfig& fit,
                         const std::optional<GaussianPolicy>& warm_start = std::nullopt);

// Adversary-only training against a frozen protagonist (RARL with N1 = 0).
// Checkpoints include the untrained adversary at iteration 0. The protagonist
// acts with its mean when `protagonist_uses_mean`, matching evaluation.
TrainArtifacts TrainAdversaryAgainst(const GaussianPolicy& protagonist, int updates,
                                     const TrainConfig& cfg, const EnvBundle& bundle,
                                     const OptimizerConfig& opt,
                                     bool protagonist_uses_mean = true);

}  // namespace advlane

#endif  // ADVLANE_TRAINERS_H_
