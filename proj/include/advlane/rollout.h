#ifndef ADVLANE_ROLLOUT_H_
#define ADVLANE_ROLLOUT_H_

#include <cstdint>
#include <vector>

#include "advlane/env.h"
#include "advlane/policy.h"

namespace advlane {

enum class Player { kProtagonist, kAdversary };

const char* PlayerName(Player p);

// One episode. All per-step vectors share one length.
struct Trajectory {
  std::vector<std::vector<double>> obs;
  std::vector<std::vector<double>> a1_raw, a1;  // protagonist draw / clamped action
  std::vector<std::vector<double>> a2_raw, a2;  // adversary draw / clamped action
  std::vector<double> r1, r2;
  std::vector<double> logp1, logp2;
  bool terminal = false;
  bool failure = false;

  std::size_t size() const { return r1.size(); }
  const std::vector<double>& Rewards(Player p) const { return p == Player::kProtagonist ? r1 : r2; }
  const std::vector<std::vector<double>>& RawActions(Player p) const {
    return p == Player::kProtagonist ? a1_raw : a2_raw;
  }
  const std::vector<std::vector<double>>& Actions(Player p) const {
    return p == Player::kProtagonist ? a1 : a2;
  }
  // Appends one step.
  void Push(std::vector<double> o, const ActionSample& p, const ActionSample& a, double rew1,
            double rew2);
};

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t MixSeed(std::uint64_t x);
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

// Independent random streams for one episode, so that e.g. swapping the
// disturbance source does not shift the target-lane draws.
struct EpisodeStreams {
  Rng env, protagonist, adversary, extra;
  EpisodeStreams(std::uint64_t seed, std::uint64_t episode);
};

// Runs one episode from Reset to termination.
Trajectory RunEpisode(const EnvBundle& bundle, const Actor& protagonist,
                      const Actor& adversary, EpisodeStreams& streams);

// Runs complete episodes until at least `step_budget` steps are collected; the
// last episode always runs to termination. Episode k uses streams derived from
// (seed, k), so the result does not depend on `workers`.
std::vector<Trajectory> Rollout(const EnvBundle& bundle, const Actor& protagonist,
                                const Actor& adversary, int step_budget, std::uint64_t seed,
                                int workers = 1);

std::size_t TotalSteps(const std::vector<Trajectory>& paths);

}  // namespace advlane

#endif  // ADVLANE_ROLLOUT_H_
