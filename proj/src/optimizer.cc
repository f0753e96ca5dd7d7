#include "advlane/optimizer.h"

#include <algorithm>
#include <cmath>

namespace advlane {

void OptimizerConfig::Validate() const {
  if (!(kl_limit > 0.0)) throw InvalidInput("optimizer.kl_limit must be > 0");
  if (!(learning_rate > 0.0)) throw InvalidInput("optimizer.learning_rate must be > 0");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw InvalidInput("optimizer.backtrack_factor must lie in (0, 1)");
  }
  if (max_backtracks < 0) throw InvalidInput("optimizer.max_backtracks must be >= 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidInput("optimizer.gamma must lie in [0, 1]");
}

std::vector<double> DiscountedRewardToGo(const std::vector<double>& rewards, double gamma) {
  std::vector<double> out(rewards.size());
  double acc = 0.0;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    acc = rewards[t] + gamma * acc;
    out[t] = acc;
  }
  return out;
}

std::vector<std::vector<double>> ComputeAdvantages(const std::vector<Trajectory>& paths,
                                                   Player player, double gamma,
                                                   const AdvantageOptions& opts) {
  std::vector<std::vector<double>> adv;
  adv.reserve(paths.size());
  std::size_t horizon = 0;
  for (const Trajectory& t : paths) {
    adv.push_back(DiscountedRewardToGo(t.Rewards(player), gamma));
    horizon = std::max(horizon, t.size());
  }

  if (opts.subtract_baseline) {
    std::vector<double> sum(horizon, 0.0);
    std::vector<int> count(horizon, 0);
    for (const auto& a : adv) {
      for (std::size_t t = 0; t < a.size(); ++t) {
        sum[t] += a[t];
        ++count[t];
      }
    }
    for (auto& a : adv) {
      for (std::size_t t = 0; t < a.size(); ++t) a[t] -= sum[t] / count[t];
    }
  }

  if (opts.normalize) {
    double n = 0.0, mean = 0.0;
    for (const auto& a : adv) {
      for (double v : a) {
        mean += v;
        n += 1.0;
      }
    }
    if (n > 1.0) {
      mean /= n;
      double var = 0.0;
      for (const auto& a : adv) {
        for (double v : a) var += (v - mean) * (v - mean);
      }
      var /= n;
      if (var > 0.0) {
        const double inv_std = 1.0 / std::sqrt(var);
        for (auto& a : adv) {
          for (double& v : a) v = (v - mean) * inv_std;
        }
      }
    }
  }
  return adv;
}

PolicyBatch MakePolicyBatch(const std::vector<Trajectory>& paths, Player player, double gamma) {
  const auto adv = ComputeAdvantages(paths, player, gamma);
  const std::size_t n = TotalSteps(paths);
  PolicyBatch b;
  if (n == 0) return b;
  const auto& first = paths.front();
  b.obs.resize(static_cast<Eigen::Index>(first.obs[0].size()), static_cast<Eigen::Index>(n));
  b.raw.resize(static_cast<Eigen::Index>(first.RawActions(player)[0].size()),
               static_cast<Eigen::Index>(n));
  b.advantage.resize(static_cast<Eigen::Index>(n));
  Eigen::Index col = 0;
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const Trajectory& t = paths[p];
    const auto& raw = t.RawActions(player);
    for (std::size_t s = 0; s < t.size(); ++s, ++col) {
      for (Eigen::Index d = 0; d < b.obs.rows(); ++d) b.obs(d, col) = t.obs[s][d];
      for (Eigen::Index d = 0; d < b.raw.rows(); ++d) b.raw(d, col) = raw[s][d];
      b.advantage(col) = adv[p][s];
    }
  }
  return b;
}

double SurrogateObjective(const GaussianPolicy& policy, const PolicyBatch& batch,
                          Eigen::VectorXd* grad) {
  const auto n = static_cast<double>(batch.advantage.size());
  const Eigen::VectorXd w = batch.advantage / n;
  return policy.WeightedLogProb(batch.obs, batch.raw, w, grad);
}

PolicyOptimizer::PolicyOptimizer(const OptimizerConfig& cfg) : cfg_(cfg) { cfg_.Validate(); }

PolicyStepReport PolicyOptimizer::Step(GaussianPolicy& policy,
                                       const std::vector<Trajectory>& paths, Player player) {
  if (TotalSteps(paths) == 0) throw InvalidInput("PolicyOptimizer::Step: empty batch");
  const PolicyBatch batch = MakePolicyBatch(paths, player, cfg_.gamma);
  if (batch.obs.rows() != policy.obs_dim() || batch.raw.rows() != policy.action_dim()) {
    throw ContractViolation("PolicyOptimizer::Step: batch dimensions do not match the policy");
  }

  PolicyStepReport report;
  Eigen::VectorXd grad;
  report.objective = SurrogateObjective(policy, batch, &grad);
  if (grad.isZero(0.0)) return report;

  const Eigen::VectorXd direction = adam_.Update(grad);
  const Eigen::VectorXd theta0 = policy.Parameters();
  const GaussianPolicy old = policy;
  double scale = cfg_.learning_rate;
  for (int k = 0; k <= cfg_.max_backtracks; ++k, scale *= cfg_.backtrack_factor) {
    policy.SetParameters(theta0 + scale * direction);
    const double kl = old.MeanKl(policy, batch.obs);
    if (std::isfinite(kl) && kl <= cfg_.kl_limit) {
      report.accepted = true;
      report.backtracks = k;
      report.kl = kl;
      return report;
    }
  }
  policy.SetParameters(theta0);
  report.backtracks = cfg_.max_backtracks;
  return report;
}

double GradientCheck(const GaussianPolicy& policy, const std::vector<Trajectory>& paths,
                     Player player, double gamma, double eps) {
  const PolicyBatch batch = MakePolicyBatch(paths, player, gamma);
  Eigen::VectorXd analytic;
  SurrogateObjective(policy, batch, &analytic);

  GaussianPolicy probe = policy;
  const Eigen::VectorXd theta = policy.Parameters();
  Eigen::VectorXd numeric(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Eigen::VectorXd t = theta;
    t(i) = theta(i) + eps;
    probe.SetParameters(t);
    const double up = SurrogateObjective(probe, batch, nullptr);
    t(i) = theta(i) - eps;
    probe.SetParameters(t);
    const double down = SurrogateObjective(probe, batch, nullptr);
    numeric(i) = (up - down) / (2.0 * eps);
  }

  constexpr double kFloor = 1e-6;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double denom = std::max({std::abs(analytic(i)), std::abs(numeric(i)), kFloor});
    worst = std::max(worst, std::abs(analytic(i) - numeric(i)) / denom);
  }
  return worst;
}

}  // namespace advlane
