#ifndef ADVLANE_MLP_H_
#define ADVLANE_MLP_H_

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "advlane/env.h"

namespace advlane {

struct MlpSpec {
  int input_dim = kObservationDim;
  std::vector<int> hidden = {256, 128, 64, 32};
  int output_dim = 2;

  void Validate() const;
  bool operator==(const MlpSpec&) const = default;
};

// Fully connected network: ReLU after every hidden layer, affine output.
// Batched inputs are column-major, one sample per column.
class Mlp {
 public:
  struct Layer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;
  };

  // Per-layer activations kept by ForwardBatch for the backward pass.
  struct Cache {
    std::vector<Eigen::MatrixXd> inputs;
  };

  Mlp() = default;
  // Zero-initialized parameters.
  explicit Mlp(const MlpSpec& spec);

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases.
  void InitUniform(Rng& rng);

  const MlpSpec& spec() const { return spec_; }
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  std::size_t NumParameters() const;

  Eigen::VectorXd Forward(std::span<const double> input) const;
  Eigen::MatrixXd ForwardBatch(const Eigen::MatrixXd& inputs, Cache* cache = nullptr) const;

  // Accumulates d(loss)/d(params) into `grad` (flattened, same order as
  // Flatten) given d(loss)/d(output) for every column of the cached batch.
  void BackwardBatch(const Cache& cache, const Eigen::MatrixXd& grad_output,
                     Eigen::Ref<Eigen::VectorXd> grad) const;

  // Layer order; each weight row-major followed by its bias.
  void Flatten(Eigen::Ref<Eigen::VectorXd> out) const;
  void Unflatten(const Eigen::Ref<const Eigen::VectorXd>& in);

 private:
  MlpSpec spec_;
  std::vector<Layer> layers_;
};

}  // namespace advlane

#endif  // ADVLANE_MLP_H_
