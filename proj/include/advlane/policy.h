#ifndef ADVLANE_POLICY_H_
#define ADVLANE_POLICY_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "advlane/env.h"
#include "advlane/mlp.h"

namespace advlane {

struct ActionSample {
  std::vector<double> raw;     // pre-clamp draw; log_prob refers to this
  std::vector<double> action;  // clamped into the action box
  double log_prob = 0.0;
};

// Anything that can choose an action from an observation. Implementations must
// be safe to call concurrently from several threads.
class Actor {
 public:
  virtual ~Actor() = default;
  virtual int action_dim() const = 0;
  virtual ActionSample Act(std::span<const double> obs, Rng& rng) const = 0;
};

// Diagonal Gaussian whose mean is an MLP of the observation and whose
// log-standard-deviation is a free per-dimension parameter.
class GaussianPolicy : public Actor {
 public:
  GaussianPolicy() = default;
  // Zero network weights, log_std = log(0.5 * half-range of the box).
  GaussianPolicy(const MlpSpec& spec, std::vector<double> action_low,
                 std::vector<double> action_high);

  // Same as the constructor but with uniformly initialized network weights.
  static GaussianPolicy Random(const MlpSpec& spec, std::vector<double> action_low,
                               std::vector<double> action_high, Rng& rng);

  int action_dim() const override { return net_.spec().output_dim; }
  int obs_dim() const { return net_.spec().input_dim; }
  const MlpSpec& spec() const { return net_.spec(); }

  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }
  Eigen::VectorXd& log_std() { return log_std_; }
  const Eigen::VectorXd& log_std() const { return log_std_; }
  const std::vector<double>& action_low() const { return low_; }
  const std::vector<double>& action_high() const { return high_; }

  Eigen::VectorXd Mean(std::span<const double> obs) const { return net_.Forward(obs); }
  Eigen::VectorXd Std() const { return log_std_.array().exp(); }

  // Gaussian log-density of a pre-clamp action.
  double LogProb(std::span<const double> obs, std::span<const double> raw) const;

  // Draws from the Gaussian, records the log-density of the draw, then clamps.
  ActionSample Act(std::span<const double> obs, Rng& rng) const override;

  std::vector<double> Clamp(const Eigen::VectorXd& a) const;

  // Network parameters (Mlp::Flatten order) followed by log_std.
  std::size_t NumParameters() const { return net_.NumParameters() + log_std_.size(); }
  Eigen::VectorXd Parameters() const;
  void SetParameters(const Eigen::Ref<const Eigen::VectorXd>& theta);

  // Returns sum_i w_i * log pi(a_i | x_i) and writes its gradient with respect
  // to Parameters() into `grad`. `obs` is obs_dim x N, `raw` is action_dim x N.
  double WeightedLogProb(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& raw,
                         const Eigen::VectorXd& weights, Eigen::VectorXd* grad) const;

  // Mean over the columns of `obs` of KL(this || other).
  double MeanKl(const GaussianPolicy& other, const Eigen::MatrixXd& obs) const;

  // FNV-1a over the raw bytes of all parameters; used to detect mutation.
  std::uint64_t ParameterHash() const;

 private:
  Mlp net_;
  Eigen::VectorXd log_std_;
  std::vector<double> low_;
  std::vector<double> high_;
};

// Acts with the clamped policy mean; consumes no randomness.
class MeanActor : public Actor {
 public:
  explicit MeanActor(const GaussianPolicy& policy) : policy_(policy) {}
  int action_dim() const override { return policy_.action_dim(); }
  ActionSample Act(std::span<const double> obs, Rng& rng) const override;

 private:
  const GaussianPolicy& policy_;
};

// Non-owning stochastic view of a policy.
class SamplingActor : public Actor {
 public:
  explicit SamplingActor(const GaussianPolicy& policy) : policy_(policy) {}
  int action_dim() const override { return policy_.action_dim(); }
  ActionSample Act(std::span<const double> obs, Rng& rng) const override {
    return policy_.Act(obs, rng);
  }

 private:
  const GaussianPolicy& policy_;
};

// Always returns the zero action; the disturbance-free opponent.
class ZeroActor : public Actor {
 public:
  explicit ZeroActor(int action_dim = 2) : dim_(action_dim) {}
  int action_dim() const override { return dim_; }
  ActionSample Act(std::span<const double> obs, Rng& rng) const override;

 private:
  int dim_;
};

// Box bounds for the two roles of the lane-change game.
std::vector<double> ProtagonistLow();
std::vector<double> ProtagonistHigh();
std::vector<double> AdversaryLow();
std::vector<double> AdversaryHigh();

GaussianPolicy MakeProtagonistPolicy(const std::vector<int>& hidden, Rng& rng);
GaussianPolicy MakeAdversaryPolicy(const std::vector<int>& hidden, Rng& rng);

}  // namespace advlane

#endif  // ADVLANE_POLICY_H_
