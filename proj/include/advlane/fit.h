#ifndef ADVLANE_FIT_H_
#define ADVLANE_FIT_H_

#include <vector>

#include "advlane/policy.h"
#include "advlane/reservoir.h"

namespace advlane {

struct FitConfig {
  int epochs = 10;
  double learning_rate = 1e-3;
  int batch_size = 64;
  bool fit_std = true;

  void Validate() const;
  bool operator==(const FitConfig&) const = default;
};

// Mean Gaussian negative log-likelihood of the buffer under `policy`.
double AverageNll(const GaussianPolicy& policy, const ExperienceBuffer& buffer);

// Maximum-likelihood regression of the stored actions on the stored
// observations, warm-started from `avg`. Each epoch is one shuffled minibatch
// pass; an epoch that raises the full-buffer loss is rolled back and the step
// size halved, so the recorded loss sequence is non-increasing.
// `epoch_losses`, when given, receives the loss before training followed by
// the loss after every epoch. Throws InvalidInput on an empty buffer.
GaussianPolicy FitAveragePolicy(const GaussianPolicy& avg, const ExperienceBuffer& buffer,
                                const FitConfig& cfg, Rng& rng,
                                std::vector<double>* epoch_losses = nullptr);

}  // namespace advlane

#endif  // ADVLANE_FIT_H_
