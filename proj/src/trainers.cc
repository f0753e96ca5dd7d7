#include "advlane/trainers.h"

#include <chrono>
#include <cmath>

namespace advlane {
namespace {

class PhaseStats {
 public:
  void Add(const std::vector<Trajectory>& paths, Player player) {
    for (const Trajectory& t : paths) {
      for (double r : t.Rewards(player)) return_sum_ += r;
      ++episodes_;
      if (t.failure) ++failures_;
      for (const auto& d : t.a2) {
        abs_da_ += std::abs(d[0]);
        abs_ds_ += std::abs(d[1]);
        ++steps_;
      }
    }
  }

  bool empty() const { return episodes_ == 0; }

  MetricRow Row(int iteration, Player player, double wall) const {
    MetricRow row;
    row.iteration = iteration;
    row.player = player;
    row.mean_reward = return_sum_ / episodes_;
    row.failure_rate = static_cast<double>(failures_) / episodes_;
    row.mean_abs_d_accel = steps_ ? abs_da_ / steps_ : 0.0;
    row.mean_abs_d_steer = steps_ ? abs_ds_ / steps_ : 0.0;
    row.wall_time_s = wall;
    return row;
  }

 private:
  double return_sum_ = 0.0;
  long episodes_ = 0;
  long failures_ = 0;
  double abs_da_ = 0.0;
  double abs_ds_ = 0.0;
  long steps_ = 0;
};

class WallClock {
 public:
  explicit WallClock(bool enabled) : enabled_(enabled) {}
  double Seconds() const {
    if (!enabled_) return 0.0;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

bool CheckpointDue(const TrainConfig& cfg, int iteration) {
  return iteration == cfg.n_iter || iteration % cfg.checkpoint_every == 0;
}

void AddRow(TrainArtifacts& out, const PhaseStats& stats, int iteration, Player player,
            const WallClock& clock) {
  if (!stats.empty()) out.log.push_back(stats.Row(iteration, player, clock.Seconds()));
}

}  // namespace

void TrainConfig::Validate() const {
  if (n_iter < 0) throw InvalidInput("train.n_iter must be >= 0");
  if (n1 < 0) throw InvalidInput("train.n1 must be >= 0");
  if (n2 < 0) throw InvalidInput("train.n2 must be >= 0");
  if (batch_steps < 1) throw InvalidInput("train.batch_steps must be >= 1");
  if (baseline_warmstart_iters < 0) {
    throw InvalidInput("train.baseline_warmstart_iters must be >= 0");
  }
  if (checkpoint_every < 1) throw InvalidInput("train.checkpoint_every must be >= 1");
  if (reservoir_capacity < 1) throw InvalidInput("train.reservoir_capacity must be >= 1");
  if (workers < 1) throw InvalidInput("train.workers must be >= 1");
  MlpSpec{kObservationDim, hidden, 2}.Validate();
}

const char* SlotName(PolicySlot slot) {
  switch (slot) {
    case PolicySlot::kProtagonist: return "protagonist";
    case PolicySlot::kAdversary: return "adversary";
    case PolicySlot::kProtagonistAverage: return "protagonist_avg";
    case PolicySlot::kAdversaryAverage: return "adversary_avg";
    case PolicySlot::kZero: return "zero";
  }
  return "unknown";
}

SimulationBackend::SimulationBackend(const EnvBundle& bundle, const TrainConfig& train,
                                     const OptimizerConfig& opt, const FitConfig& fit)
    : bundle_(bundle),
      batch_steps_(train.batch_steps),
      workers_(train.workers),
      opt_(opt),
      fit_(fit),
      rng_(DeriveSeed(train.seed, 0xbac4e9d)) {
  bundle_.Validate();
  opt_.Validate();
  fit_.Validate();
}

std::vector<Trajectory> SimulationBackend::Rollout(const Actor& protagonist, PolicySlot,
                                                   const Actor& adversary, PolicySlot) {
  const std::uint64_t seed = rng_();
  return advlane::Rollout(bundle_, protagonist, adversary, batch_steps_, seed, workers_);
}

void SimulationBackend::Optimize(GaussianPolicy& policy, PolicySlot slot,
                                 const std::vector<Trajectory>& paths, Player player) {
  auto it = optimizers_.find(slot);
  if (it == optimizers_.end()) it = optimizers_.emplace(slot, PolicyOptimizer(opt_)).first;
  it->second.Step(policy, paths, player);
}

void SimulationBackend::Populate(ExperienceBuffer& buffer, const std::vector<Trajectory>& paths,
                                 Player player) {
  for (const Trajectory& t : paths) {
    const auto& actions = t.Actions(player);
    for (std::size_t s = 0; s < t.size(); ++s) buffer.Insert({t.obs[s], actions[s]}, rng_);
  }
}

GaussianPolicy SimulationBackend::Fit(const GaussianPolicy& average, PolicySlot,
                                      const ExperienceBuffer& buffer) {
  return FitAveragePolicy(average, buffer, fit_, rng_);
}

GaussianPolicy InitialProtagonist(const TrainConfig& cfg) {
  Rng rng(DeriveSeed(cfg.seed, 0x9707));
  return MakeProtagonistPolicy(cfg.hidden, rng);
}

GaussianPolicy InitialAdversary(const TrainConfig& cfg) {
  Rng rng(DeriveSeed(cfg.seed, 0xad7));
  return MakeAdversaryPolicy(cfg.hidden, rng);
}

TrainArtifacts TrainBaseline(const TrainConfig& cfg, TrainingBackend& backend,
                             GaussianPolicy protagonist) {
  cfg.Validate();
  const WallClock clock(cfg.record_wall_time);
  const ZeroActor zero(2);
  TrainArtifacts out;
  out.checkpoints.push_back({0, PolicySlot::kProtagonist, protagonist});
  for (int i = 1; i <= cfg.n_iter; ++i) {
    PhaseStats stats;
    const auto paths =
        backend.Rollout(protagonist, PolicySlot::kProtagonist, zero, PolicySlot::kZero);
    stats.Add(paths, Player::kProtagonist);
    backend.Optimize(protagonist, PolicySlot::kProtagonist, paths, Player::kProtagonist);
    AddRow(out, stats, i, Player::kProtagonist, clock);
    if (CheckpointDue(cfg, i)) out.checkpoints.push_back({i, PolicySlot::kProtagonist, protagonist});
  }
  out.protagonist = std::move(protagonist);
  out.adversary = GaussianPolicy({kObservationDim, cfg.hidden, 2}, AdversaryLow(), AdversaryHigh());
  return out;
}

TrainArtifacts TrainRarl(const TrainConfig& cfg, TrainingBackend& backend,
                         GaussianPolicy protagonist, GaussianPolicy adversary) {
  cfg.Validate();
  const WallClock clock(cfg.record_wall_time);
  TrainArtifacts out;
  out.checkpoints.push_back({0, PolicySlot::kProtagonist, protagonist});
  out.checkpoints.push_back({0, PolicySlot::kAdversary, adversary});
  for (int i = 1; i <= cfg.n_iter; ++i) {
    PhaseStats prot_stats;
    for (int j = 1; j <= cfg.n1; ++j) {
      const auto paths =
          backend.Rollout(protagonist, PolicySlot::kProtagonist, adversary, PolicySlot::kAdversary);
      prot_stats.Add(paths, Player::kProtagonist);
      backend.Optimize(protagonist, PolicySlot::kProtagonist, paths, Player::kProtagonist);
    }
    AddRow(out, prot_stats, i, Player::kProtagonist, clock);

    PhaseStats adv_stats;
    for (int k = 1; k <= cfg.n2; ++k) {
      const auto paths =
          backend.Rollout(protagonist, PolicySlot::kProtagonist, adversary, PolicySlot::kAdversary);
      adv_stats.Add(paths, Player::kAdversary);
      backend.Optimize(adversary, PolicySlot::kAdversary, paths, Player::kAdversary);
    }
    AddRow(out, adv_stats, i, Player::kAdversary, clock);

    if (CheckpointDue(cfg, i)) {
      out.checkpoints.push_back({i, PolicySlot::kProtagonist, protagonist});
      out.checkpoints.push_back({i, PolicySlot::kAdversary, adversary});
    }
  }
  out.protagonist = std::move(protagonist);
  out.adversary = std::move(adversary);
  return out;
}

TrainArtifacts TrainNfsp(const TrainConfig& cfg, TrainingBackend& backend,
                         GaussianPolicy protagonist_br, GaussianPolicy adversary_br,
                         GaussianPolicy protagonist_avg, GaussianPolicy adversary_avg) {
  cfg.Validate();
  const WallClock clock(cfg.record_wall_time);
  ExperienceBuffer m_p(cfg.reservoir_capacity);
  ExperienceBuffer m_a(cfg.reservoir_capacity);
  TrainArtifacts out;
  out.checkpoints.push_back({0, PolicySlot::kProtagonistAverage, protagonist_avg});
  out.checkpoints.push_back({0, PolicySlot::kAdversaryAverage, adversary_avg});
  for (int i = 1; i <= cfg.n_iter; ++i) {
    PhaseStats prot_stats;
    for (int j = 1; j <= cfg.n1; ++j) {
      const auto paths = backend.Rollout(protagonist_br, PolicySlot::kProtagonist, adversary_avg,
                                         PolicySlot::kAdversaryAverage);
      prot_stats.Add(paths, Player::kProtagonist);
      backend.Optimize(protagonist_br, PolicySlot::kProtagonist, paths, Player::kProtagonist);
      backend.Populate(m_p, paths, Player::kProtagonist);
    }
    if (!m_p.empty()) {
      protagonist_avg = backend.Fit(protagonist_avg, PolicySlot::kProtagonistAverage, m_p);
    }
    AddRow(out, prot_stats, i, Player::kProtagonist, clock);

    PhaseStats adv_stats;
    for (int k = 1; k <= cfg.n2; ++k) {
      const auto paths = backend.Rollout(protagonist_avg, PolicySlot::kProtagonistAverage,
                                         adversary_br, PolicySlot::kAdversary);
      adv_stats.Add(paths, Player::kAdversary);
      backend.Optimize(adversary_br, PolicySlot::kAdversary, paths, Player::kAdversary);
      backend.Populate(m_a, paths, Player::kAdversary);
    }
    if (!m_a.empty()) {
      adversary_avg = backend.Fit(adversary_avg, PolicySlot::kAdversaryAverage, m_a);
    }
    AddRow(out, adv_stats, i, Player::kAdversary, clock);

    if (CheckpointDue(cfg, i)) {
      out.checkpoints.push_back({i, PolicySlot::kProtagonistAverage, protagonist_avg});
      out.checkpoints.push_back({i, PolicySlot::kAdversaryAverage, adversary_avg});
    }
  }
  out.protagonist = std::move(protagonist_br);
  out.adversary = std::move(adversary_br);
  out.protagonist_average = std::move(protagonist_avg);
  out.adversary_average = std::move(adversary_avg);
  return out;
}

namespace {

GaussianPolicy WarmStartedProtagonist(const TrainConfig& cfg, const EnvBundle& bundle,
                                      const OptimizerConfig& opt,
                                      const std::optional<GaussianPolicy>& warm_start) {
  if (warm_start) return *warm_start;
  GaussianPolicy p = InitialProtagonist(cfg);
  if (cfg.baseline_warmstart_iters == 0) return p;
  TrainConfig pre = cfg;
  pre.n_iter = cfg.baseline_warmstart_iters;
  pre.seed = DeriveSeed(cfg.seed, 0x3a53);
  SimulationBackend backend(bundle, pre, opt, FitConfig{});
  return TrainBaseline(pre, backend, std::move(p)).protagonist;
}

}  // namespace

TrainArtifacts TrainBaseline(const TrainConfig& cfg, const EnvBundle& bundle,
                             const OptimizerConfig& opt) {
  SimulationBackend backend(bundle, cfg, opt, FitConfig{});
  return TrainBaseline(cfg, backend, InitialProtagonist(cfg));
}

TrainArtifacts TrainRarl(const TrainConfig& cfg, const EnvBundle& bundle,
                         const OptimizerConfig& opt,
                         const std::optional<GaussianPolicy>& warm_start) {
  GaussianPolicy prot = WarmStartedProtagonist(cfg, bundle, opt, warm_start);
  SimulationBackend backend(bundle, cfg, opt, FitConfig{});
  return TrainRarl(cfg, backend, std::move(prot), InitialAdversary(cfg));
}

TrainArtifacts TrainNfsp(const TrainConfig& cfg, const EnvBundle& bundle,
                         const OptimizerConfig& opt, const FitConfig& fit,
                         const std::optional<GaussianPolicy>& warm_start) {
  GaussianPolicy prot = WarmStartedProtagonist(cfg, bundle, opt, warm_start);
  SimulationBackend backend(bundle, cfg, opt, fit);
  GaussianPolicy adv = InitialAdversary(cfg);
  GaussianPolicy prot_avg = prot;
  GaussianPolicy adv_avg = adv;
  return TrainNfsp(cfg, backend, std::move(prot), std::move(adv), std::move(prot_avg),
                   std::move(adv_avg));
}

TrainArtifacts TrainAdversaryAgainst(const GaussianPolicy& protagonist, int updates,
                                     const TrainConfig& cfg, const EnvBundle& bundle,
                                     const OptimizerConfig& opt, bool protagonist_uses_mean) {
  TrainConfig adv_cfg = cfg;
  adv_cfg.n_iter = updates;
  adv_cfg.n1 = 0;
  adv_cfg.n2 = 1;
  adv_cfg.Validate();
  SimulationBackend backend(bundle, adv_cfg, opt, FitConfig{});
  const WallClock clock(adv_cfg.record_wall_time);
  const MeanActor mean_actor(protagonist);
  const SamplingActor sampling_actor(protagonist);
  const Actor& prot = protagonist_uses_mean ? static_cast<const Actor&>(mean_actor)
                                            : static_cast<const Actor&>(sampling_actor);
  GaussianPolicy adversary = InitialAdversary(adv_cfg);
  TrainArtifacts out;
  out.checkpoints.push_back({0, PolicySlot::kAdversary, adversary});
  for (int i = 1; i <= updates; ++i) {
    PhaseStats stats;
    const auto paths =
        backend.Rollout(prot, PolicySlot::kProtagonist, adversary, PolicySlot::kAdversary);
    stats.Add(paths, Player::kAdversary);
    backend.Optimize(adversary, PolicySlot::kAdversary, paths, Player::kAdversary);
    AddRow(out, stats, i, Player::kAdversary, clock);
    if (CheckpointDue(adv_cfg, i)) out.checkpoints.push_back({i, PolicySlot::kAdversary, adversary});
  }
  out.protagonist = protagonist;
  out.adversary = std::move(adversary);
  return out;
}

}  // namespace advlane
