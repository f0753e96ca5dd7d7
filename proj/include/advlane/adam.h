#ifndef ADVLANE_ADAM_H_
#define ADVLANE_ADAM_H_

#include <cmath>

#include <Eigen/Dense>

namespace advlane {

// Adam moment estimates over a flat parameter vector. Direction() returns the
// bias-corrected ascent direction for the gradient passed to Update().
class AdamState {
 public:
  explicit AdamState(double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : beta1_(beta1), beta2_(beta2), eps_(eps) {}

  Eigen::VectorXd Update(const Eigen::VectorXd& grad) {
    if (m_.size() != grad.size()) {
      m_ = Eigen::VectorXd::Zero(grad.size());
      v_ = Eigen::VectorXd::Zero(grad.size());
      t_ = 0;
    }
    ++t_;
    m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
    v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(beta1_, t_);
    const double c2 = 1.0 - std::pow(beta2_, t_);
    return (m_ / c1).array() / ((v_ / c2).array().sqrt() + eps_);
  }

  long steps() const { return t_; }

 private:
  double beta1_, beta2_, eps_;
  Eigen::VectorXd m_, v_;
  long t_ = 0;
};

}  // namespace advlane

#endif  // ADVLANE_ADAM_H_
