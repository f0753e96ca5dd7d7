#include "advlane/cli.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include <CLI11.hpp>

#include "advlane/checkpoint.h"

namespace advlane {
namespace fs = std::filesystem;

namespace {

std::string ReadFile(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path.string() + ": cannot open for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void CheckProtagonistShape(const GaussianPolicy& p, const fs::path& path) {
  if (p.obs_dim() != kObservationDim || p.action_dim() != 2) {
    std::ostringstream msg;
    msg << path.string() << ": policy has observation/action dimensions " << p.obs_dim() << "/"
        << p.action_dim() << ", environment expects " << kObservationDim << "/2";
    throw std::runtime_error(msg.str());
  }
  if (p.action_low() != ProtagonistLow() || p.action_high() != ProtagonistHigh()) {
    throw std::runtime_error(path.string() +
                             ": action bounds do not match the protagonist's actuator limits");
  }
}

fs::path CheckpointPath(const fs::path& dir, PolicySlot slot, int iteration) {
  return dir / (std::string(SlotName(slot)) + "_iter" + std::to_string(iteration) + ".ckpt");
}

const char* TrainModeName(TrainMode m) {
  switch (m) {
    case TrainMode::kBaseline: return "baseline";
    case TrainMode::kRarl: return "rarl";
    case TrainMode::kNfsp: return "nfsp";
  }
  return "unknown";
}

double LastReward(const std::vector<MetricRow>& log, Player player) {
  for (auto it = log.rbegin(); it != log.rend(); ++it) {
    if (it->player == player) return it->mean_reward;
  }
  return 0.0;
}

}  // namespace

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string MetricsCsv(const std::vector<MetricRow>& rows) {
  std::string out = std::string(kMetricsHeader) + "\n";
  for (const MetricRow& r : rows) {
    out += std::to_string(r.iteration) + "," + PlayerName(r.player) + "," +
           FormatDouble(r.mean_reward) + "," + FormatDouble(r.failure_rate) + "," +
           FormatDouble(r.mean_abs_d_accel) + "," + FormatDouble(r.mean_abs_d_steer) + "," +
           FormatDouble(r.wall_time_s) + "\n";
  }
  return out;
}

std::string EvalCsvRow(const EvalReport& r) {
  for (const std::string* s : {&r.policy_id, &r.test_id, &r.param}) {
    if (s->find_first_of(",\"\n") != std::string::npos) {
      throw std::runtime_error("identifier '" + *s + "' cannot be written to CSV");
    }
  }
  return r.policy_id + "," + r.test_id + "," + r.param + "," + std::to_string(r.n_rollouts) + "," +
         FormatDouble(r.mean_reward) + "," + FormatDouble(r.stderr_reward) + "," +
         FormatDouble(r.failure_rate) + "," + std::to_string(r.seed);
}

void WriteFileAtomic(const fs::path& path, const std::string& contents) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error(tmp.string() + ": cannot open for writing");
    f << contents;
    f.flush();
    if (!f) throw std::runtime_error(tmp.string() + ": write failed");
  }
  fs::rename(tmp, path);
}

void AppendEvalCsv(const fs::path& path, const std::vector<EvalReport>& reports) {
  std::string contents;
  if (fs::exists(path)) {
    ReadEvalCsv(path);
    contents = ReadFile(path);
    if (!contents.empty() && contents.back() != '\n') contents += '\n';
  } else {
    contents = std::string(kEvalHeader) + "\n";
  }
  for (const EvalReport& r : reports) contents += EvalCsvRow(r) + "\n";
  WriteFileAtomic(path, contents);
}

std::vector<EvalCsvRecord> ReadEvalCsv(const fs::path& path) {
  std::istringstream in(ReadFile(path));
  std::string line;
  if (!std::getline(in, line) || line != kEvalHeader) {
    throw std::runtime_error(path.string() + ": missing or unexpected evaluation CSV header");
  }
  std::vector<EvalCsvRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = SplitCsvLine(line);
    if (fields.size() != 8) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected 8 fields, found " + std::to_string(fields.size()));
    }
    records.push_back({fields[0], fields[1], fields[2], line});
  }
  return records;
}

std::optional<TrainMode> ParseTrainMode(const std::string& s) {
  if (s == "baseline") return TrainMode::kBaseline;
  if (s == "rarl") return TrainMode::kRarl;
  if (s == "nfsp") return TrainMode::kNfsp;
  return std::nullopt;
}

std::optional<EvalTest> ParseEvalTest(const std::string& s) {
  if (s == "pareto") return EvalTest::kPareto;
  if (s == "adversarial") return EvalTest::kAdversarial;
  if (s == "lsc") return EvalTest::kLsc;
  if (s == "axle") return EvalTest::kAxle;
  if (s == "clean") return EvalTest::kClean;
  return std::nullopt;
}

const char* EvalTestName(EvalTest t) {
  switch (t) {
    case EvalTest::kPareto: return "pareto";
    case EvalTest::kAdversarial: return "adversarial";
    case EvalTest::kLsc: return "lsc";
    case EvalTest::kAxle: return "axle";
    case EvalTest::kClean: return "clean";
  }
  return "unknown";
}

int CmdTrain(const ExperimentConfig& cfg, TrainMode mode, std::ostream& out, std::ostream& err) {
  const fs::path dir = cfg.run.out_dir;
  try {
    fs::create_directories(dir);
    WriteFileAtomic(dir / kIncompleteMarker,
                    std::string("train ") + TrainModeName(mode) + " in progress\n");
    const EnvBundle bundle = cfg.Bundle();
    TrainArtifacts art;
    switch (mode) {
      case TrainMode::kBaseline:
        art = TrainBaseline(cfg.train, bundle, cfg.optimizer);
        break;
      case TrainMode::kRarl:
        art = TrainRarl(cfg.train, bundle, cfg.optimizer);
        break;
      case TrainMode::kNfsp:
        art = TrainNfsp(cfg.train, bundle, cfg.optimizer, cfg.fit);
        break;
    }

    WriteFileAtomic(dir / "config.cfg", SerializeConfig(cfg));
    WriteFileAtomic(dir / "metrics.csv", MetricsCsv(art.log));
    if (mode == TrainMode::kBaseline) {
      SavePolicy(dir / "protagonist.ckpt", art.protagonist);
    } else {
      const fs::path ckpt_dir = dir / "checkpoints";
      fs::create_directories(ckpt_dir);
      for (const PolicyCheckpoint& c : art.checkpoints) {
        SavePolicy(CheckpointPath(ckpt_dir, c.slot, c.iteration), c.policy);
      }
      if (mode == TrainMode::kRarl) {
        SavePolicy(dir / "protagonist.ckpt", art.protagonist);
        SavePolicy(dir / "adversary.ckpt", art.adversary);
      } else {
        // The average policies are the NFSP solution; best responses are kept alongside.
        SavePolicy(dir / "protagonist.ckpt", *art.protagonist_average);
        SavePolicy(dir / "adversary.ckpt", *art.adversary_average);
        SavePolicy(dir / "protagonist_br.ckpt", art.protagonist);
        SavePolicy(dir / "adversary_br.ckpt", art.adversary);
      }
    }
    fs::remove(dir / kIncompleteMarker);
    out << "train " << TrainModeName(mode) << ": " << cfg.train.n_iter << " iterations, "
        << art.log.size() << " metric rows, final protagonist mean_reward "
        << FormatDouble(LastReward(art.log, Player::kProtagonist)) << ", output "
        << dir.string() << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "train failed: " << e.what() << "\n";
    return kExitFailure;
  }
}

int CmdEval(const ExperimentConfig& cfg, const fs::path& checkpoint, EvalTest test,
            std::ostream& out, std::ostream& err) {
  const fs::path dir = cfg.run.out_dir;
  try {
    if (!fs::exists(checkpoint)) {
      throw std::runtime_error(checkpoint.string() + ": checkpoint not found");
    }
    const GaussianPolicy policy = LoadPolicy(checkpoint);
    CheckProtagonistShape(policy, checkpoint);

    EvalOptions opts;
    opts.policy_id = checkpoint.stem().string();
    opts.n_rollouts = cfg.eval.rollouts;
    opts.seed = cfg.run.seed;
    opts.workers = cfg.run.workers;
    opts.deterministic = cfg.eval.deterministic;
    const EnvBundle bundle = cfg.Bundle();

    std::vector<EvalReport> reports;
    switch (test) {
      case EvalTest::kPareto:
        reports = RunParetoTest(policy, cfg.pareto.beta_list, cfg.pareto, bundle, opts);
        break;
      case EvalTest::kAdversarial: {
        EnvBundle adv_bundle = bundle;
        adv_bundle.adversary.mode = cfg.eval.adversary_mode;
        const TrainArtifacts art =
            TrainAdversaryAgainst(policy, cfg.eval.adversary_updates, cfg.train, adv_bundle,
                                  cfg.optimizer, cfg.eval.deterministic);
        fs::create_directories(dir / "adversaries");
        for (const PolicyCheckpoint& c : art.checkpoints) {
          SavePolicy(dir / "adversaries" /
                         (opts.policy_id + "_iter" + std::to_string(c.iteration) + ".ckpt"),
                     c.policy);
        }
        reports = RunAdversarialTest(policy, art.checkpoints, bundle, opts);
        break;
      }
      case EvalTest::kLsc:
        reports.push_back(RunLscTest(policy, bundle, opts));
        break;
      case EvalTest::kAxle:
        reports.push_back(RunAxleTest(policy, bundle, opts, AxleRange{}));
        break;
      case EvalTest::kClean:
        reports.push_back(RunCleanTest(policy, bundle, opts));
        break;
    }

    fs::create_directories(dir);
    const fs::path csv = dir / ("eval_" + std::string(EvalTestName(test)) + ".csv");
    AppendEvalCsv(csv, reports);
    for (const EvalReport& r : reports) {
      out << "eval " << r.test_id << " " << r.policy_id << " param=" << r.param
          << " mean_reward=" << FormatDouble(r.mean_reward)
          << " failure_rate=" << FormatDouble(r.failure_rate) << "\n";
    }
    out << reports.size() << " rows appended to " << csv.string() << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "eval failed: " << e.what() << "\n";
    return kExitFailure;
  }
}

int CmdReport(const fs::path& dir, std::ostream& out, std::ostream& err) {
  try {
    if (!fs::is_directory(dir)) {
      throw std::runtime_error(dir.string() + ": not a directory");
    }
    std::vector<std::pair<fs::file_time_type, fs::path>> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && name.rfind("eval", 0) == 0 &&
          entry.path().extension() == ".csv") {
        files.emplace_back(entry.last_write_time(), entry.path());
      }
    }
    std::sort(files.begin(), files.end());

    using Key = std::tuple<std::string, std::string, std::string>;
    std::map<Key, std::string> merged;
    for (const auto& [mtime, path] : files) {
      for (const EvalCsvRecord& rec : ReadEvalCsv(path)) {
        const Key key{rec.policy_id, rec.test_id, rec.param};
        auto [it, inserted] = merged.try_emplace(key, rec.line);
        if (!inserted) {
          err << "warning: duplicate row for (" << rec.policy_id << ", " << rec.test_id << ", "
              << rec.param << "); keeping the one from " << path.filename().string() << "\n";
          it->second = rec.line;
        }
      }
    }
    if (files.empty()) err << "warning: no evaluation CSVs found in " << dir.string() << "\n";

    std::string contents = std::string(kEvalHeader) + "\n";
    for (const auto& [key, line] : merged) contents += line + "\n";
    const fs::path report = dir / "report.csv";
    WriteFileAtomic(report, contents);
    out << "report: " << merged.size() << " rows from " << files.size() << " files, written to "
        << report.string() << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "report failed: " << e.what() << "\n";
    return kExitFailure;
  }
}

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adversarial and self-play training for a lane-change driving task"};
  app.name("advlane");
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  int workers = 1;
  std::string mode;
  std::string test;
  std::string checkpoint;
  std::string beta_list;
  int rollouts = 0;

  struct Common {
    CLI::Option* seed;
    CLI::Option* out;
    CLI::Option* workers;
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Experiment configuration file")
        ->check(CLI::ExistingFile);
    return Common{sub->add_option("--seed", seed, "Random seed (overrides run.seed)"),
                  sub->add_option("--out", out_dir, "Output directory (overrides run.out_dir)"),
                  sub->add_option("--workers", workers, "Rollout worker threads")
                      ->check(CLI::PositiveNumber)};
  };

  CLI::App* train = app.add_subcommand("train", "Train policies and write metrics/checkpoints");
  const Common train_opts = add_common(train);
  train->add_option("--mode", mode, "Training procedure")
      ->required()
      ->check(CLI::IsMember({"baseline", "rarl", "nfsp"}));

  CLI::App* eval = app.add_subcommand("eval", "Run a robustness test on a checkpoint");
  const Common eval_opts = add_common(eval);
  eval->add_option("--test", test, "Test battery")
      ->required()
      ->check(CLI::IsMember({"pareto", "adversarial", "lsc", "axle", "clean"}));
  eval->add_option("--checkpoint", checkpoint, "Protagonist checkpoint")->required();
  CLI::Option* beta_opt =
      eval->add_option("--beta-list", beta_list, "Comma-separated Pareto shapes, e.g. 1,5,10");
  CLI::Option* rollouts_opt = eval->add_option("--rollouts", rollouts, "Rollouts per test")
                                  ->check(CLI::PositiveNumber);
  CLI::Option* adv_mode_opt =
      eval->add_option("--mode", mode, "Reward mode of the adversary trained by the adversarial test")
          ->check(CLI::IsMember({"zero_sum", "semi_competitive"}));

  CLI::App* report = app.add_subcommand("report", "Merge evaluation CSVs of a run directory");
  report->add_option("dir", out_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (report->parsed()) return CmdReport(out_dir, out, err);

  const Common& common = train->parsed() ? train_opts : eval_opts;
  ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = LoadConfig(config_path);
    if (common.seed->count()) cfg.run.seed = seed;
    if (common.out->count()) cfg.run.out_dir = out_dir;
    if (common.workers->count()) cfg.run.workers = workers;
    if (eval->parsed()) {
      if (beta_opt->count()) SetConfigValue(cfg, "pareto.beta_list", beta_list);
      if (rollouts_opt->count()) cfg.eval.rollouts = rollouts;
      if (adv_mode_opt->count()) SetConfigValue(cfg, "eval.adversary_mode", mode);
    }
    cfg.Finalize();
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (train->parsed()) return CmdTrain(cfg, *ParseTrainMode(mode), out, err);
  return CmdEval(cfg, checkpoint, *ParseEvalTest(test), out, err);
}

}  // namespace advlane
