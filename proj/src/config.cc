#include "advlane/config.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace advlane {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double ToDouble(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

template <typename Int>
Int ToInt(const std::string& key, const std::string& v) {
  Int out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

bool ToBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

AdversaryMode ToMode(const std::string& key, const std::string& v) {
  if (v == "zero_sum") return AdversaryMode::kZeroSum;
  if (v == "semi_competitive") return AdversaryMode::kSemiCompetitive;
  throw ConfigError(key + ": expected zero_sum or semi_competitive, got '" + v + "'");
}

std::string ModeName(AdversaryMode m) {
  return m == AdversaryMode::kZeroSum ? "zero_sum" : "semi_competitive";
}

std::string Fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

template <typename Int>
std::string FmtInt(Int v) {
  return std::to_string(v);
}

std::string FmtBool(bool b) { return b ? "true" : "false"; }

std::string FmtList(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += Fmt(v[i]);
  }
  return out;
}

std::string FmtIntList(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

std::vector<int> ToIntList(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(ToInt<int>(key, Trim(item)));
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated list");
  return out;
}

struct Entry {
  const char* key;
  std::function<void(ExperimentConfig&, const std::string& key, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define ADV_DOUBLE(name, field)                                                     \
  Entry {                                                                           \
    name, [](ExperimentConfig& c, const std::string& k,                             \
             const std::string& v) { c.field = ToDouble(k, v); },                   \
        [](const ExperimentConfig& c) { return Fmt(c.field); }                      \
  }
#define ADV_INT(name, field, type)                                                  \
  Entry {                                                                           \
    name, [](ExperimentConfig& c, const std::string& k,                             \
             const std::string& v) { c.field = ToInt<type>(k, v); },                \
        [](const ExperimentConfig& c) { return FmtInt(c.field); }                   \
  }
#define ADV_BOOL(name, field)                                                       \
  Entry {                                                                           \
    name, [](ExperimentConfig& c, const std::string& k,                             \
             const std::string& v) { c.field = ToBool(k, v); },                     \
        [](const ExperimentConfig& c) { return FmtBool(c.field); }                  \
  }

const std::vector<Entry>& Entries() {
  static const std::vector<Entry> entries = {
      {"run.name", [](ExperimentConfig& c, const std::string&,
                      const std::string& v) { c.run.name = v; },
       [](const ExperimentConfig& c) { return c.run.name; }},
      {"run.out_dir", [](ExperimentConfig& c, const std::string&,
                         const std::string& v) { c.run.out_dir = v; },
       [](const ExperimentConfig& c) { return c.run.out_dir; }},
      ADV_INT("run.seed", run.seed, std::uint64_t),
      ADV_INT("run.workers", run.workers, int),
      ADV_BOOL("run.record_wall_time", run.record_wall_time),

      ADV_DOUBLE("env.lane_width", env.lane_width),
      ADV_INT("env.num_lanes", env.num_lanes, int),
      ADV_DOUBLE("env.init_speed", env.init_speed),
      ADV_DOUBLE("env.dt", env.dt),
      ADV_INT("env.max_steps", env.max_steps, int),
      ADV_DOUBLE("env.v_min", env.v_min),
      ADV_DOUBLE("env.v_max", env.v_max),
      ADV_DOUBLE("env.w_velocity", env.weights.velocity),
      ADV_DOUBLE("env.w_heading", env.weights.heading),
      ADV_DOUBLE("env.w_accel", env.weights.accel),
      ADV_DOUBLE("env.w_steer", env.weights.steer),
      ADV_DOUBLE("env.w_lateral", env.weights.lateral),
      ADV_DOUBLE("env.collision_reward", env.collision_reward),
      ADV_DOUBLE("env.gamma", env.gamma),

      {"adversary.mode", [](ExperimentConfig& c, const std::string& k,
                            const std::string& v) { c.adversary.mode = ToMode(k, v); },
       [](const ExperimentConfig& c) { return ModeName(c.adversary.mode); }},
      ADV_DOUBLE("adversary.r_a", adversary.r_a),
      ADV_DOUBLE("adversary.d_accel_max", adversary.d_accel_max),
      ADV_DOUBLE("adversary.d_steer_max", adversary.d_steer_max),

      ADV_DOUBLE("vehicle.l_a", vehicle.l_a),
      ADV_DOUBLE("vehicle.l_b", vehicle.l_b),
      {"vehicle.steer_rate_limit",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "none") {
           c.vehicle.steer_rate_limit.reset();
         } else {
           c.vehicle.steer_rate_limit = ToDouble(k, v);
         }
       },
       [](const ExperimentConfig& c) {
         return c.vehicle.steer_rate_limit ? Fmt(*c.vehicle.steer_rate_limit)
                                           : std::string("none");
       }},

      {"policy.hidden", [](ExperimentConfig& c, const std::string& k,
                           const std::string& v) { c.train.hidden = ToIntList(k, v); },
       [](const ExperimentConfig& c) { return FmtIntList(c.train.hidden); }},

      ADV_INT("train.n_iter", train.n_iter, int),
      ADV_INT("train.n1", train.n1, int),
      ADV_INT("train.n2", train.n2, int),
      ADV_INT("train.batch_steps", train.batch_steps, int),
      ADV_INT("train.baseline_warmstart_iters", train.baseline_warmstart_iters, int),
      ADV_INT("train.checkpoint_every", train.checkpoint_every, int),
      ADV_INT("train.reservoir_capacity", train.reservoir_capacity, std::size_t),

      ADV_DOUBLE("optimizer.kl_limit", optimizer.kl_limit),
      ADV_DOUBLE("optimizer.learning_rate", optimizer.learning_rate),
      ADV_DOUBLE("optimizer.backtrack_factor", optimizer.backtrack_factor),
      ADV_INT("optimizer.max_backtracks", optimizer.max_backtracks, int),

      ADV_INT("fit.epochs", fit.epochs, int),
      ADV_DOUBLE("fit.learning_rate", fit.learning_rate),
      ADV_INT("fit.batch_size", fit.batch_size, int),
      ADV_BOOL("fit.fit_std", fit.fit_std),

      ADV_DOUBLE("pareto.x_m", pareto.x_m),
      ADV_DOUBLE("pareto.sign_flip_prob", pareto.sign_flip_prob),
      ADV_DOUBLE("pareto.magnitude_scale", pareto.magnitude_scale),
      {"pareto.beta_list",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         try {
           c.pareto.beta_list = ParseDoubleList(v);
         } catch (const ConfigError& e) {
           throw ConfigError(k + ": " + e.what());
         }
       },
       [](const ExperimentConfig& c) { return FmtList(c.pareto.beta_list); }},

      ADV_INT("eval.rollouts", eval.rollouts, int),
      ADV_BOOL("eval.deterministic", eval.deterministic),
      ADV_INT("eval.adversary_updates", eval.adversary_updates, int),
      {"eval.adversary_mode", [](ExperimentConfig& c, const std::string& k,
                                 const std::string& v) { c.eval.adversary_mode = ToMode(k, v); },
       [](const ExperimentConfig& c) { return ModeName(c.eval.adversary_mode); }},
  };
  return entries;
}

#undef ADV_DOUBLE
#undef ADV_INT
#undef ADV_BOOL

}  // namespace

std::vector<double> ParseDoubleList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(ToDouble("list entry", Trim(item)));
  if (out.empty()) throw ConfigError("expected a comma-separated list of numbers");
  return out;
}

void ExperimentConfig::Finalize() {
  vehicle.dt = env.dt;
  optimizer.gamma = env.gamma;
  train.seed = run.seed;
  train.workers = run.workers;
  train.record_wall_time = run.record_wall_time;
  try {
    if (run.workers < 1) throw InvalidInput("run.workers must be >= 1");
    if (run.out_dir.empty()) throw InvalidInput("run.out_dir must not be empty");
    env.Validate();
    adversary.Validate();
    vehicle.Validate();
    train.Validate();
    optimizer.Validate();
    fit.Validate();
    pareto.Validate();
    if (eval.rollouts < 1) throw InvalidInput("eval.rollouts must be >= 1");
    if (eval.adversary_updates < 0) throw InvalidInput("eval.adversary_updates must be >= 0");
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return run == o.run && env == o.env && adversary == o.adversary && vehicle == o.vehicle &&
         train == o.train && optimizer == o.optimizer && fit == o.fit && pareto == o.pareto &&
         eval == o.eval;
}

void SetConfigValue(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const auto& entries = Entries();
  const auto it = std::find_if(entries.begin(), entries.end(),
                               [&](const Entry& e) { return key == e.key; });
  if (it == entries.end()) throw ConfigError(key + ": unknown configuration key");
  it->set(cfg, key, value);
}

ExperimentConfig ParseConfig(const std::string& text, const std::string& source) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = Trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "empty key");
    if (!section.empty()) key = section + "." + key;
    try {
      SetConfigValue(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  try {
    cfg.Finalize();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path.string() + ": cannot open configuration file");
  std::stringstream ss;
  ss << f.rdbuf();
  return ParseConfig(ss.str(), path.string());
}

std::string SerializeConfig(const ExperimentConfig& cfg) {
  std::string out;
  for (const Entry& e : Entries()) {
    out += e.key;
    out += " = ";
    out += e.get(cfg);
    out += "\n";
  }
  return out;
}

std::vector<std::string> ConfigKeys() {
  std::vector<std::string> keys;
  for (const Entry& e : Entries()) keys.emplace_back(e.key);
  return keys;
}

ExperimentConfig LargeScaleConfig() {
  ExperimentConfig cfg;
  cfg.train.hidden = {256, 128, 64, 32};
  cfg.train.n_iter = 4000;
  cfg.train.n1 = 5;
  cfg.train.n2 = 5;
  cfg.train.batch_steps = 400;
  cfg.train.baseline_warmstart_iters = 5000;
  cfg.train.reservoir_capacity = 20000;
  cfg.eval.rollouts = 500;
  cfg.Finalize();
  return cfg;
}

}  // namespace advlane
