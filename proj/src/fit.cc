#include "advlane/fit.h"

#include <algorithm>
#include <numeric>

#include "advlane/adam.h"

namespace advlane {
namespace {

void Gather(const ExperienceBuffer& buffer, std::span<const std::size_t> idx,
            Eigen::MatrixXd& obs, Eigen::MatrixXd& act) {
  const auto& items = buffer.items();
  const auto n = static_cast<Eigen::Index>(idx.size());
  obs.resize(static_cast<Eigen::Index>(items[idx[0]].obs.size()), n);
  act.resize(static_cast<Eigen::Index>(items[idx[0]].action.size()), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const ObsAction& it = items[idx[i]];
    for (Eigen::Index d = 0; d < obs.rows(); ++d) obs(d, i) = it.obs[d];
    for (Eigen::Index d = 0; d < act.rows(); ++d) act(d, i) = it.action[d];
  }
}

}  // namespace

void FitConfig::Validate() const {
  if (epochs < 0) throw InvalidInput("fit.epochs must be >= 0");
  if (!(learning_rate > 0.0)) throw InvalidInput("fit.learning_rate must be > 0");
  if (batch_size < 1) throw InvalidInput("fit.batch_size must be >= 1");
}

double AverageNll(const GaussianPolicy& policy, const ExperienceBuffer& buffer) {
  if (buffer.empty()) throw InvalidInput("AverageNll: empty buffer");
  std::vector<std::size_t> idx(buffer.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Eigen::MatrixXd obs, act;
  Gather(buffer, idx, obs, act);
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(obs.cols(), 1.0);
  return -policy.WeightedLogProb(obs, act, w, nullptr) / static_cast<double>(obs.cols());
}

GaussianPolicy FitAveragePolicy(const GaussianPolicy& avg, const ExperienceBuffer& buffer,
                                const FitConfig& cfg, Rng& rng,
                                std::vector<double>* epoch_losses) {
  if (buffer.empty()) throw InvalidInput("FitAveragePolicy: empty reservoir buffer");
  cfg.Validate();

  GaussianPolicy policy = avg;
  double loss = AverageNll(policy, buffer);
  if (epoch_losses) {
    epoch_losses->clear();
    epoch_losses->push_back(loss);
  }

  AdamState adam;
  double lr = cfg.learning_rate;
  std::vector<std::size_t> order(buffer.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto n_std = policy.log_std().size();
  Eigen::MatrixXd obs, act;
  Eigen::VectorXd grad;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const Eigen::VectorXd start = policy.Parameters();
    const AdamState adam_start = adam;
    Eigen::VectorXd theta = start;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
      const std::size_t e = std::min(order.size(), b + cfg.batch_size);
      Gather(buffer, std::span(order).subspan(b, e - b), obs, act);
      const Eigen::VectorXd w = Eigen::VectorXd::Constant(obs.cols(), 1.0 / obs.cols());
      policy.WeightedLogProb(obs, act, w, &grad);  // ascent on log-likelihood
      if (!cfg.fit_std) grad.tail(n_std).setZero();
      theta += lr * adam.Update(grad);
      policy.SetParameters(theta);
    }
    const double new_loss = AverageNll(policy, buffer);
    if (new_loss <= loss) {
      loss = new_loss;
    } else {
      policy.SetParameters(start);
      adam = adam_start;
      lr *= 0.5;
    }
    if (epoch_losses) epoch_losses->push_back(loss);
  }
  return policy;
}

}  // namespace advlane
