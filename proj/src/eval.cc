#include "advlane/eval.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <thread>

namespace advlane {
namespace {

std::string FormatParam(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

EvalReport MakeReport(const std::vector<Trajectory>& trajs, const EvalOptions& opts,
                      std::string test_id, std::string param) {
  const MetricSummary m = ComputeMetrics(trajs);
  EvalReport r;
  r.policy_id = opts.policy_id;
  r.test_id = std::move(test_id);
  r.param = std::move(param);
  r.n_rollouts = m.n;
  r.mean_reward = m.mean_reward;
  r.stderr_reward = m.stderr_reward;
  r.failure_rate = m.failure_rate;
  r.seed = opts.seed;
  return r;
}

std::unique_ptr<Actor> ProtagonistActor(const GaussianPolicy& policy, const EvalOptions& opts) {
  if (opts.deterministic) return std::make_unique<MeanActor>(policy);
  return std::make_unique<SamplingActor>(policy);
}

}  // namespace

void ParetoConfig::Validate() const {
  if (!(x_m > 0.0)) throw InvalidInput("pareto.x_m must be > 0");
  if (!(sign_flip_prob >= 0.0 && sign_flip_prob <= 1.0)) {
    throw InvalidInput("pareto.sign_flip_prob must lie in [0, 1]");
  }
  if (!(magnitude_scale >= 0.0 && magnitude_scale <= kDisturbanceFraction)) {
    throw InvalidInput("pareto.magnitude_scale must lie in [0, 0.2]");
  }
  for (double b : beta_list) {
    if (!(b >= 1.0)) throw InvalidInput("pareto.beta_list entries must be >= 1");
  }
}

MetricSummary ComputeMetrics(const std::vector<Trajectory>& trajs) {
  if (trajs.empty()) throw InvalidInput("ComputeMetrics: no trajectories");
  MetricSummary m;
  m.n = static_cast<int>(trajs.size());
  std::vector<double> values;
  values.reserve(trajs.size());
  int failures = 0;
  for (const Trajectory& t : trajs) {
    double sum = 0.0;
    // A failure step carries only the collision reward; it is always the last.
    const std::size_t keep = t.failure && t.size() > 0 ? t.size() - 1 : t.size();
    for (std::size_t s = 0; s < keep; ++s) sum += t.r1[s];
    values.push_back(sum);
    if (t.failure) ++failures;
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= m.n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  m.mean_reward = mean;
  m.stderr_reward = m.n > 1 ? std::sqrt(var / (m.n - 1) / m.n) : 0.0;
  m.failure_rate = static_cast<double>(failures) / m.n;
  return m;
}

double ParetoFromUniform(double u, double beta, double x_m) {
  return x_m * std::pow(u, -1.0 / beta);
}

double SamplePareto(double beta, double x_m, Rng& rng) {
  // 1 - U[0, 1) is uniform on (0, 1].
  const double u = 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return ParetoFromUniform(u, beta, x_m);
}

Disturbance ParetoDisturbance(double beta, const ParetoConfig& pc, Rng& rng) {
  std::bernoulli_distribution flip(pc.sign_flip_prob);
  auto channel = [&](double max_value) {
    const double x = SamplePareto(beta, pc.x_m, rng);
    const double m = pc.magnitude_scale * max_value * (pc.x_m / x);
    return flip(rng) ? -m : m;
  };
  Disturbance d;
  d.d_accel = channel(kMaxAccel);
  d.d_steer = channel(kMaxSteer);
  return d;
}

ActionSample ParetoDisturbanceActor::Act(std::span<const double>, Rng& rng) const {
  const Disturbance d = ParetoDisturbance(beta_, pc_, rng);
  ActionSample s;
  s.raw = {d.d_accel, d.d_steer};
  s.action = s.raw;
  return s;
}

ActionSample UniformDisturbanceActor::Act(std::span<const double>, Rng& rng) const {
  std::uniform_real_distribution<double> da(-kMaxDisturbAccel, kMaxDisturbAccel);
  std::uniform_real_distribution<double> ds(-kMaxDisturbSteer, kMaxDisturbSteer);
  ActionSample s;
  const double a = da(rng);
  const double b = ds(rng);
  s.raw = {a, b};
  s.action = s.raw;
  return s;
}

VehicleParams SampleAxles(const VehicleParams& base, const AxleRange& range, Rng& rng) {
  VehicleParams p = base;
  if (range.high > range.low) {
    std::uniform_real_distribution<double> dist(range.low, range.high);
    p.l_a = dist(rng);
    p.l_b = dist(rng);
  } else {
    p.l_a = p.l_b = range.low;
  }
  return p;
}

std::vector<Trajectory> EvaluateEpisodes(const EnvBundle& bundle, const Actor& protagonist,
                                         const Actor& adversary, int n, std::uint64_t seed,
                                         int workers, const EpisodeConfigurator& configure) {
  std::vector<Trajectory> out(std::max(0, n));
  auto run = [&](int k) {
    EpisodeStreams streams(seed, static_cast<std::uint64_t>(k));
    if (configure) {
      EnvBundle local = bundle;
      configure(local, streams.extra);
      out[k] = RunEpisode(local, protagonist, adversary, streams);
    } else {
      out[k] = RunEpisode(bundle, protagonist, adversary, streams);
    }
  };
  workers = std::max(1, workers);
  if (workers == 1) {
    for (int k = 0; k < n; ++k) run(k);
    return out;
  }
  std::vector<std::thread> threads;
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      for (int k = w; k < n; k += workers) run(k);
    });
  }
  for (auto& t : threads) t.join();
  return out;
}

EvalReport RunCleanTest(const GaussianPolicy& policy, const EnvBundle& bundle,
                        const EvalOptions& opts) {
  const auto actor = ProtagonistActor(policy, opts);
  const ZeroActor zero(2);
  const auto trajs =
      EvaluateEpisodes(bundle, *actor, zero, opts.n_rollouts, opts.seed, opts.workers);
  return MakeReport(trajs, opts, "clean", "n.a.");
}

std::vector<EvalReport> RunParetoTest(const GaussianPolicy& policy,
                                      const std::vector<double>& beta_list,
                                      const ParetoConfig& pc, const EnvBundle& bundle,
                                      const EvalOptions& opts) {
  pc.Validate();
  const auto actor = ProtagonistActor(policy, opts);
  std::vector<EvalReport> reports;
  for (double beta : beta_list) {
    if (!(beta >= 1.0)) throw InvalidInput("pareto beta must be >= 1");
    const ParetoDisturbanceActor adversary(beta, pc);
    const auto trajs =
        EvaluateEpisodes(bundle, *actor, adversary, opts.n_rollouts, opts.seed, opts.workers);
    reports.push_back(MakeReport(trajs, opts, "pareto", FormatParam(beta)));
  }
  return reports;
}

std::vector<EvalReport> RunAdversarialTest(const GaussianPolicy& protagonist,
                                           const std::vector<PolicyCheckpoint>& adversaries,
                                           const EnvBundle& bundle, const EvalOptions& opts) {
  const auto actor = ProtagonistActor(protagonist, opts);
  std::vector<EvalReport> reports;
  for (const PolicyCheckpoint& ckpt : adversaries) {
    const auto trajs = EvaluateEpisodes(bundle, *actor, ckpt.policy, opts.n_rollouts,
                                        opts.seed, opts.workers);
    reports.push_back(MakeReport(trajs, opts, "adversarial", std::to_string(ckpt.iteration)));
  }
  return reports;
}

EvalReport RunLscTest(const GaussianPolicy& policy, const EnvBundle& bundle,
                      const EvalOptions& opts, double steer_rate_limit) {
  EnvBundle lsc = bundle;
  lsc.vehicle.steer_rate_limit = steer_rate_limit;
  lsc.Validate();
  const auto actor = ProtagonistActor(policy, opts);
  const UniformDisturbanceActor adversary;
  const auto trajs =
      EvaluateEpisodes(lsc, *actor, adversary, opts.n_rollouts, opts.seed, opts.workers);
  return MakeReport(trajs, opts, "lsc", "n.a.");
}

EvalReport RunAxleTest(const GaussianPolicy& policy, const EnvBundle& bundle,
                       const EvalOptions& opts, const AxleRange& range) {
  if (!(range.low > 0.0) || range.high < range.low) {
    throw InvalidInput("axle range must satisfy 0 < low <= high");
  }
  const auto actor = ProtagonistActor(policy, opts);
  const UniformDisturbanceActor adversary;
  const auto trajs = EvaluateEpisodes(
      bundle, *actor, adversary, opts.n_rollouts, opts.seed, opts.workers,
      [&range](EnvBundle& b, Rng& rng) { b.vehicle = SampleAxles(b.vehicle, range, rng); });
  return MakeReport(trajs, opts, "axle", "n.a.");
}

EvalReport RunUniformDisturbanceTest(const GaussianPolicy& policy, const EnvBundle& bundle,
                                     const EvalOptions& opts) {
  const auto actor = ProtagonistActor(policy, opts);
  const UniformDisturbanceActor adversary;
  const auto trajs =
      EvaluateEpisodes(bundle, *actor, adversary, opts.n_rollouts, opts.seed, opts.workers);
  return MakeReport(trajs, opts, "uniform", "n.a.");
}

}  // namespace advlane
