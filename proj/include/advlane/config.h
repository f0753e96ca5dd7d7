#ifndef ADVLANE_CONFIG_H_
#define ADVLANE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "advlane/env.h"
#include "advlane/eval.h"
#include "advlane/fit.h"
#include "advlane/optimizer.h"
#include "advlane/trainers.h"

namespace advlane {

struct RunConfig {
  std::string name = "run";
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int workers = 1;
  bool record_wall_time = false;

  bool operator==(const RunConfig&) const = default;
};

struct EvalConfig {
  int rollouts = 100;
  bool deterministic = true;
  // Adversary training budget for the adversarial-disturbance battery.
  int adversary_updates = 60;
  AdversaryMode adversary_mode = AdversaryMode::kZeroSum;

  bool operator==(const EvalConfig&) const = default;
};

struct ExperimentConfig {
  RunConfig run;
  EnvConfig env;
  AdversaryRewardConfig adversary;
  VehicleParams vehicle;
  TrainConfig train;
  OptimizerConfig optimizer;
  FitConfig fit;
  ParetoConfig pareto;
  EvalConfig eval;

  // Copies the shared keys (seed, workers, dt, gamma, ...) into the
  // per-module structs and validates everything. Throws ConfigError.
  void Finalize();

  EnvBundle Bundle() const { return {env, adversary, vehicle}; }

  bool operator==(const ExperimentConfig& o) const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Plain-text "section.key = value" lines; '#' starts a comment; a "[section]"
// line prefixes following bare keys. Unknown keys are errors.
ExperimentConfig ParseConfig(const std::string& text, const std::string& source = "<string>");
ExperimentConfig LoadConfig(const std::filesystem::path& path);

// Applies one "key = value" assignment (used for CLI overrides).
void SetConfigValue(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// Every key with its current value; ParseConfig(SerializeConfig(c)) == c.
std::string SerializeConfig(const ExperimentConfig& cfg);

// The documented key list, in serialization order.
std::vector<std::string> ConfigKeys();

// Large-scale settings (large network, long training, 500 evaluation rollouts).
ExperimentConfig LargeScaleConfig();

std::vector<double> ParseDoubleList(const std::string& text);

}  // namespace advlane

#endif  // ADVLANE_CONFIG_H_
