#ifndef ADVLANE_OPTIMIZER_H_
#define ADVLANE_OPTIMIZER_H_

#include <vector>

#include <Eigen/Dense>

#include "advlane/adam.h"
#include "advlane/policy.h"
#include "advlane/rollout.h"

namespace advlane {

struct OptimizerConfig {
  // Upper bound on the mean KL(old || new) over batch states for an accepted update.
  double kl_limit = 0.01;
  // Scale of the Adam-preconditioned gradient step before backtracking.
  double learning_rate = 0.01;
  double backtrack_factor = 0.5;
  int max_backtracks = 10;
  double gamma = 0.99;

  void Validate() const;
  bool operator==(const OptimizerConfig&) const = default;
};

// sum_{k >= t} gamma^(k - t) r_k for every t.
std::vector<double> DiscountedRewardToGo(const std::vector<double>& rewards, double gamma);

struct AdvantageOptions {
  // Subtract the mean reward-to-go of all paths at the same time index.
  bool subtract_baseline = true;
  // Rescale to zero mean / unit variance over the batch (skipped for a
  // single step or when every advantage is equal).
  bool normalize = true;
};

std::vector<std::vector<double>> ComputeAdvantages(const std::vector<Trajectory>& paths,
                                                   Player player, double gamma,
                                                   const AdvantageOptions& opts = {});

// Flattened on-policy batch for one player.
struct PolicyBatch {
  Eigen::MatrixXd obs;        // obs_dim x N
  Eigen::MatrixXd raw;        // action_dim x N, pre-clamp draws
  Eigen::VectorXd advantage;  // N
};

PolicyBatch MakePolicyBatch(const std::vector<Trajectory>& paths, Player player, double gamma);

// mean_i A_i * log pi(a_i | s_i); writes the gradient when `grad` is non-null.
double SurrogateObjective(const GaussianPolicy& policy, const PolicyBatch& batch,
                          Eigen::VectorXd* grad);

struct PolicyStepReport {
  bool accepted = false;
  int backtracks = 0;
  double kl = 0.0;
  double objective = 0.0;
};

// Likelihood-ratio policy gradient with a KL-bounded backtracking line search.
// Holds Adam moments that persist across calls.
class PolicyOptimizer {
 public:
  explicit PolicyOptimizer(const OptimizerConfig& cfg = {});

  // Updates `policy` in place. `paths` must have been generated by `policy`
  // acting as `player`. Throws InvalidInput on an empty batch.
  PolicyStepReport Step(GaussianPolicy& policy, const std::vector<Trajectory>& paths,
                        Player player);

  const OptimizerConfig& config() const { return cfg_; }

 private:
  OptimizerConfig cfg_;
  AdamState adam_;
};

// Max over parameters of |analytic - central difference| / max(|analytic|,
// |numeric|, floor) for the surrogate objective gradient.
double GradientCheck(const GaussianPolicy& policy, const std::vector<Trajectory>& paths,
                     Player player, double gamma, double eps = 1e-5);

}  // namespace advlane

#endif  // ADVLANE_OPTIMIZER_H_
