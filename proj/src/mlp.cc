#include "advlane/mlp.h"

#include <cmath>
#include <string>

namespace advlane {

void MlpSpec::Validate() const {
  if (input_dim < 1) throw InvalidInput("policy.input_dim must be >= 1");
  if (output_dim < 1) throw InvalidInput("policy.output_dim must be >= 1");
  if (hidden.empty()) throw InvalidInput("policy.hidden needs at least one layer");
  for (int w : hidden) {
    if (w < 1) throw InvalidInput("policy.hidden widths must be >= 1");
  }
}

Mlp::Mlp(const MlpSpec& spec) : spec_(spec) {
  spec_.Validate();
  int in = spec_.input_dim;
  for (std::size_t i = 0; i <= spec_.hidden.size(); ++i) {
    const int out = i < spec_.hidden.size() ? spec_.hidden[i] : spec_.output_dim;
    layers_.push_back({Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)});
    in = out;
  }
}

void Mlp::InitUniform(Rng& rng) {
  for (Layer& layer : layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = dist(rng);
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = dist(rng);
  }
}

std::size_t Mlp::NumParameters() const {
  std::size_t n = 0;
  for (const Layer& layer : layers_) n += layer.weight.size() + layer.bias.size();
  return n;
}

Eigen::VectorXd Mlp::Forward(std::span<const double> input) const {
  if (static_cast<int>(input.size()) != spec_.input_dim) {
    throw ContractViolation("Mlp::Forward: expected input of length " +
                            std::to_string(spec_.input_dim) + ", got " +
                            std::to_string(input.size()));
  }
  Eigen::VectorXd h = Eigen::Map<const Eigen::VectorXd>(input.data(), input.size());
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Eigen::VectorXd z = layers_[i].weight * h + layers_[i].bias;
    if (i + 1 < layers_.size()) z = z.cwiseMax(0.0);
    h = std::move(z);
  }
  return h;
}

Eigen::MatrixXd Mlp::ForwardBatch(const Eigen::MatrixXd& inputs, Cache* cache) const {
  if (inputs.rows() != spec_.input_dim) {
    throw ContractViolation("Mlp::ForwardBatch: input row count does not match input_dim");
  }
  if (cache) cache->inputs.clear();
  Eigen::MatrixXd h = inputs;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Eigen::MatrixXd z = layers_[i].weight * h;
    z.colwise() += layers_[i].bias;
    if (i + 1 < layers_.size()) z = z.cwiseMax(0.0);
    if (cache) cache->inputs.push_back(std::move(h));
    h = std::move(z);
  }
  return h;
}

void Mlp::BackwardBatch(const Cache& cache, const Eigen::MatrixXd& grad_output,
                        Eigen::Ref<Eigen::VectorXd> grad) const {
  // Offsets of each layer's block inside the flat vector.
  std::vector<Eigen::Index> offset(layers_.size());
  Eigen::Index pos = 0;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    offset[i] = pos;
    pos += layers_[i].weight.size() + layers_[i].bias.size();
  }

  Eigen::MatrixXd g = grad_output;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const Layer& layer = layers_[k];
    const Eigen::MatrixXd& in = cache.inputs[k];
    const Eigen::MatrixXd gw = g * in.transpose();
    Eigen::Index p = offset[k];
    for (Eigen::Index r = 0; r < gw.rows(); ++r) {
      for (Eigen::Index c = 0; c < gw.cols(); ++c) grad(p++) += gw(r, c);
    }
    grad.segment(p, layer.bias.size()) += g.rowwise().sum();
    if (k > 0) {
      Eigen::MatrixXd back = layer.weight.transpose() * g;
      g = back.cwiseProduct((in.array() > 0.0).cast<double>().matrix());
    }
  }
}

void Mlp::Flatten(Eigen::Ref<Eigen::VectorXd> out) const {
  Eigen::Index p = 0;
  for (const Layer& layer : layers_) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) out(p++) = layer.weight(r, c);
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) out(p++) = layer.bias(r);
  }
}

void Mlp::Unflatten(const Eigen::Ref<const Eigen::VectorXd>& in) {
  Eigen::Index p = 0;
  for (Layer& layer : layers_) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = in(p++);
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = in(p++);
  }
}

}  // namespace advlane
