#include "advlane/policy.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

namespace advlane {
namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * log(2 pi)

}  // namespace

GaussianPolicy::GaussianPolicy(const MlpSpec& spec, std::vector<double> action_low,
                               std::vector<double> action_high)
    : net_(spec), low_(std::move(action_low)), high_(std::move(action_high)) {
  if (static_cast<int>(low_.size()) != spec.output_dim ||
      static_cast<int>(high_.size()) != spec.output_dim) {
    throw InvalidInput("action bounds must have output_dim entries");
  }
  log_std_.resize(spec.output_dim);
  for (int d = 0; d < spec.output_dim; ++d) {
    if (!(high_[d] > low_[d])) throw InvalidInput("action_high must exceed action_low");
    log_std_(d) = std::log(0.5 * 0.5 * (high_[d] - low_[d]));
  }
}

GaussianPolicy GaussianPolicy::Random(const MlpSpec& spec, std::vector<double> action_low,
                                      std::vector<double> action_high, Rng& rng) {
  GaussianPolicy p(spec, std::move(action_low), std::move(action_high));
  p.net_.InitUniform(rng);
  // Small output layer so the initial mean sits near the middle of the box.
  Mlp::Layer& out = p.net_.layers().back();
  out.weight *= 0.01;
  out.bias *= 0.01;
  return p;
}

double GaussianPolicy::LogProb(std::span<const double> obs, std::span<const double> raw) const {
  const Eigen::VectorXd mean = Mean(obs);
  double lp = 0.0;
  for (int d = 0; d < action_dim(); ++d) {
    const double z = (raw[d] - mean(d)) * std::exp(-log_std_(d));
    lp += -log_std_(d) - kHalfLog2Pi - 0.5 * z * z;
  }
  return lp;
}

std::vector<double> GaussianPolicy::Clamp(const Eigen::VectorXd& a) const {
  std::vector<double> out(a.size());
  for (Eigen::Index d = 0; d < a.size(); ++d) out[d] = std::clamp(a(d), low_[d], high_[d]);
  return out;
}

ActionSample GaussianPolicy::Act(std::span<const double> obs, Rng& rng) const {
  const Eigen::VectorXd mean = Mean(obs);
  std::normal_distribution<double> normal(0.0, 1.0);
  ActionSample s;
  s.raw.resize(action_dim());
  Eigen::VectorXd draw(action_dim());
  for (int d = 0; d < action_dim(); ++d) {
    const double z = normal(rng);
    draw(d) = mean(d) + std::exp(log_std_(d)) * z;
    s.raw[d] = draw(d);
    s.log_prob += -log_std_(d) - kHalfLog2Pi - 0.5 * z * z;
  }
  s.action = Clamp(draw);
  return s;
}

Eigen::VectorXd GaussianPolicy::Parameters() const {
  Eigen::VectorXd theta(NumParameters());
  const auto n = static_cast<Eigen::Index>(net_.NumParameters());
  net_.Flatten(theta.head(n));
  theta.tail(log_std_.size()) = log_std_;
  return theta;
}

void GaussianPolicy::SetParameters(const Eigen::Ref<const Eigen::VectorXd>& theta) {
  if (theta.size() != static_cast<Eigen::Index>(NumParameters())) {
    throw ContractViolation("SetParameters: parameter vector has the wrong length");
  }
  const auto n = static_cast<Eigen::Index>(net_.NumParameters());
  net_.Unflatten(theta.head(n));
  log_std_ = theta.tail(log_std_.size());
}

double GaussianPolicy::WeightedLogProb(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& raw,
                                       const Eigen::VectorXd& weights,
                                       Eigen::VectorXd* grad) const {
  Mlp::Cache cache;
  const Eigen::MatrixXd mean = net_.ForwardBatch(obs, grad ? &cache : nullptr);
  const Eigen::ArrayXd inv_var = (-2.0 * log_std_.array()).exp();
  const Eigen::ArrayXXd diff = (raw - mean).array();

  double value = 0.0;
  for (Eigen::Index i = 0; i < obs.cols(); ++i) {
    double lp = 0.0;
    for (Eigen::Index d = 0; d < diff.rows(); ++d) {
      lp += -log_std_(d) - kHalfLog2Pi - 0.5 * diff(d, i) * diff(d, i) * inv_var(d);
    }
    value += weights(i) * lp;
  }
  if (!grad) return value;

  grad->setZero(NumParameters());
  // d lp / d mean = (a - mu) / sigma^2 ; d lp / d log_std = z^2 - 1.
  Eigen::MatrixXd grad_mean = diff.colwise() * inv_var;
  grad_mean = grad_mean.array().rowwise() * weights.transpose().array();
  const auto n = static_cast<Eigen::Index>(net_.NumParameters());
  net_.BackwardBatch(cache, grad_mean, grad->head(n));
  for (Eigen::Index d = 0; d < log_std_.size(); ++d) {
    const Eigen::ArrayXd z2 = diff.row(d).transpose().square() * inv_var(d);
    (*grad)(n + d) = (weights.array() * (z2 - 1.0)).sum();
  }
  return value;
}

double GaussianPolicy::MeanKl(const GaussianPolicy& other, const Eigen::MatrixXd& obs) const {
  if (obs.cols() == 0) return 0.0;
  const Eigen::MatrixXd mu_p = net_.ForwardBatch(obs);
  const Eigen::MatrixXd mu_q = other.net_.ForwardBatch(obs);
  const Eigen::ArrayXd var_p = (2.0 * log_std_.array()).exp();
  const Eigen::ArrayXd var_q = (2.0 * other.log_std_.array()).exp();
  // KL(p||q) per dimension: log(sq/sp) + (sp^2 + (mp - mq)^2) / (2 sq^2) - 1/2
  const double const_part =
      (other.log_std_.array() - log_std_.array() + var_p / (2.0 * var_q) - 0.5).sum();
  const Eigen::ArrayXXd d2 = (mu_p - mu_q).array().square();
  const double mean_part = (d2.colwise() / (2.0 * var_q)).sum() / obs.cols();
  return const_part + mean_part;
}

std::uint64_t GaussianPolicy::ParameterHash() const {
  const Eigen::VectorXd theta = Parameters();
  std::uint64_t h = 1469598103934665603ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(theta.data());
  for (std::size_t i = 0; i < theta.size() * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

ActionSample MeanActor::Act(std::span<const double> obs, Rng& /*rng*/) const {
  const Eigen::VectorXd mean = policy_.Mean(obs);
  ActionSample s;
  s.raw.assign(mean.data(), mean.data() + mean.size());
  s.action = policy_.Clamp(mean);
  s.log_prob = policy_.LogProb(obs, s.raw);
  return s;
}

ActionSample ZeroActor::Act(std::span<const double> /*obs*/, Rng& /*rng*/) const {
  ActionSample s;
  s.raw.assign(dim_, 0.0);
  s.action.assign(dim_, 0.0);
  return s;
}

std::vector<double> ProtagonistLow() { return {-kMaxAccel, -kMaxSteer}; }
std::vector<double> ProtagonistHigh() { return {kMaxAccel, kMaxSteer}; }
std::vector<double> AdversaryLow() { return {-kMaxDisturbAccel, -kMaxDisturbSteer}; }
std::vector<double> AdversaryHigh() { return {kMaxDisturbAccel, kMaxDisturbSteer}; }

GaussianPolicy MakeProtagonistPolicy(const std::vector<int>& hidden, Rng& rng) {
  return GaussianPolicy::Random({kObservationDim, hidden, 2}, ProtagonistLow(),
                                ProtagonistHigh(), rng);
}

GaussianPolicy MakeAdversaryPolicy(const std::vector<int>& hidden, Rng& rng) {
  return GaussianPolicy::Random({kObservationDim, hidden, 2}, AdversaryLow(), AdversaryHigh(),
                                rng);
}

}  // namespace advlane
