#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "advlane/checkpoint.h"
#include "advlane/cli.h"
#include "advlane/config.h"

namespace advlane {
namespace {

namespace fs = std::filesystem;

std::string Slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int CountLines(const std::string& s) {
  return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("advlane_cli_" + std::to_string(counter_++) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult RunTool(std::vector<std::string> args) {
  args.insert(args.begin(), "advlane");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

void WriteText(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

constexpr const char* kTinyConfig =
    "# smoke-test profile\n"
    "[train]\n"
    "n_iter = 1\n"
    "batch_steps = 200\n"
    "baseline_warmstart_iters = 1\n"
    "checkpoint_every = 1\n"
    "[policy]\n"
    "hidden = 8\n"
    "[eval]\n"
    "rollouts = 3\n"
    "adversary_updates = 2\n";

TEST(Config, EmptyTextGivesDefaults) {
  ExperimentConfig defaults;
  defaults.Finalize();
  EXPECT_EQ(ParseConfig(""), defaults);
  EXPECT_EQ(defaults.train.hidden, (std::vector<int>{64, 32}));
  EXPECT_EQ(defaults.eval.rollouts, 100);
}

TEST(Config, SectionsCommentsAndDottedKeys) {
  const ExperimentConfig cfg = ParseConfig(
      "run.seed = 17  # trailing comment\n[env]\nv_max = 30\n[adversary]\nmode = zero_sum\n");
  EXPECT_EQ(cfg.run.seed, 17u);
  EXPECT_EQ(cfg.train.seed, 17u);
  EXPECT_EQ(cfg.env.v_max, 30.0);
  EXPECT_EQ(cfg.adversary.mode, AdversaryMode::kZeroSum);
  // Inside a section every key is prefixed with the section name.
  EXPECT_THROW(ParseConfig("[adversary]\nvehicle.l_a = 2\n"), ConfigError);
  EXPECT_EQ(ParseConfig("vehicle.steer_rate_limit = 0.1\n").vehicle.steer_rate_limit, 0.1);
}

TEST(Config, ErrorsNameTheKey) {
  try {
    ParseConfig("adversary.r_a = -1\n", "x.cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("adversary.r_a"), std::string::npos);
  }
  try {
    ParseConfig("[env]\nv_max = 2\nv_min = 0\n", "x.cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("log base"), std::string::npos);
  }
  try {
    ParseConfig("\n\nenv.bogus = 1\n", "x.cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("x.cfg:3"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("env.bogus"), std::string::npos);
  }
  EXPECT_THROW(ParseConfig("train.n_iter = ten\n"), ConfigError);
  EXPECT_THROW(ParseConfig("adversary.mode = friendly\n"), ConfigError);
  EXPECT_THROW(ParseConfig("no equals sign\n"), ConfigError);
  EXPECT_THROW(LoadConfig("/nonexistent/advlane.cfg"), ConfigError);
}

TEST(Config, RoundTripsThroughText) {
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    ExperimentConfig cfg;
    cfg.run.seed = rng();
    cfg.run.name = "run" + std::to_string(i);
    cfg.env.lane_width = 2.5 + u(rng);
    cfg.env.v_max = 15.0 + 10.0 * u(rng);
    cfg.env.gamma = 0.9 + 0.09 * u(rng);
    cfg.env.weights.lateral = u(rng);
    cfg.adversary.mode = i % 2 ? AdversaryMode::kZeroSum : AdversaryMode::kSemiCompetitive;
    cfg.adversary.r_a = 5.0 * u(rng);
    cfg.vehicle.l_a = 0.5 + 2.0 * u(rng);
    if (i % 3 == 0) cfg.vehicle.steer_rate_limit = 0.01 + u(rng);
    cfg.train.hidden = {1 + i % 7, 3};
    cfg.train.n_iter = i;
    cfg.optimizer.learning_rate = u(rng) * 1e-2 + 1e-6;
    cfg.fit.fit_std = i % 2 == 0;
    cfg.pareto.beta_list = {1.0 + u(rng), 2.0 + u(rng)};
    cfg.eval.deterministic = i % 4 != 0;
    cfg.Finalize();
    EXPECT_EQ(ParseConfig(SerializeConfig(cfg)), cfg);
  }
}

TEST(Config, EveryKeyIsSerialized) {
  const std::string text = SerializeConfig(ExperimentConfig{});
  for (const std::string& key : ConfigKeys()) {
    EXPECT_NE(text.find(key + " = "), std::string::npos) << key;
  }
}

TEST(Config, LargeScaleProfile) {
  const ExperimentConfig cfg = LargeScaleConfig();
  EXPECT_EQ(cfg.train.hidden, (std::vector<int>{256, 128, 64, 32}));
  EXPECT_EQ(cfg.train.n_iter, 4000);
  EXPECT_EQ(cfg.train.batch_steps, 400);
  EXPECT_EQ(cfg.train.reservoir_capacity, 20000u);
  EXPECT_EQ(cfg.eval.rollouts, 500);
  EXPECT_EQ(ParseConfig(SerializeConfig(cfg)), cfg);
}

TEST(Config, ShippedProfilesLoad) {
  const fs::path root = ADVLANE_SOURCE_DIR;
  EXPECT_NO_THROW(LoadConfig(root / "configs" / "desk.cfg"));
  EXPECT_EQ(LoadConfig(root / "configs" / "large.cfg"), LargeScaleConfig());
}

TEST(Cli, BaselineSmokeRun) {
  TempDir dir;
  WriteText(dir.path() / "c.cfg", kTinyConfig);
  const fs::path out = dir.path() / "out";
  const CliResult r = RunTool({"train", "--config", (dir.path() / "c.cfg").string(), "--mode",
                           "baseline", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(CountLines(r.out), 1);
  const std::string metrics = Slurp(out / "metrics.csv");
  EXPECT_EQ(CountLines(metrics), 2);
  EXPECT_EQ(metrics.substr(0, metrics.find('\n')), kMetricsHeader);
  int ckpts = 0;
  for (const auto& e : fs::recursive_directory_iterator(out)) ckpts += e.path().extension() == ".ckpt";
  EXPECT_EQ(ckpts, 1);
  EXPECT_FALSE(fs::exists(out / kIncompleteMarker));
}

TEST(Cli, RepeatedTrainingIsByteIdentical) {
  TempDir dir;
  WriteText(dir.path() / "c.cfg", kTinyConfig);
  for (const char* run : {"a", "b"}) {
    ASSERT_EQ(RunTool({"train", "--config", (dir.path() / "c.cfg").string(), "--mode", "rarl",
                   "--out", (dir.path() / run).string(), "--seed", "9"})
                  .code,
              0);
  }
  EXPECT_EQ(Slurp(dir.path() / "a" / "metrics.csv"), Slurp(dir.path() / "b" / "metrics.csv"));
  EXPECT_EQ(Slurp(dir.path() / "a" / "adversary.ckpt"), Slurp(dir.path() / "b" / "adversary.ckpt"));
}

TEST(Cli, NfspWritesAverageAndBestResponses) {
  TempDir dir;
  WriteText(dir.path() / "c.cfg", kTinyConfig);
  const fs::path out = dir.path() / "n";
  ASSERT_EQ(RunTool({"train", "--config", (dir.path() / "c.cfg").string(), "--mode", "nfsp", "--out",
                 out.string()})
                .code,
            0);
  for (const char* f : {"protagonist.ckpt", "adversary.ckpt", "protagonist_br.ckpt",
                        "adversary_br.ckpt", "checkpoints/protagonist_avg_iter1.ckpt"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(RunTool({"train", "--mode", "bogus"}).code, kExitUsage);
  EXPECT_EQ(RunTool({"eval", "--test", "clean"}).code, kExitUsage);
  EXPECT_EQ(RunTool({}).code, kExitUsage);
  EXPECT_EQ(RunTool({"--help"}).code, kExitOk);
  TempDir dir;
  WriteText(dir.path() / "bad.cfg", "adversary.r_a = -1\n");
  const CliResult r =
      RunTool({"train", "--config", (dir.path() / "bad.cfg").string(), "--mode", "baseline"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("adversary.r_a"), std::string::npos);
}

class CliEval : public ::testing::Test {
 protected:
  void SetUp() override {
    WriteText(dir_.path() / "c.cfg", kTinyConfig);
    ASSERT_EQ(RunTool({"train", "--config", Cfg(), "--mode", "baseline", "--out", Out()}).code, 0);
  }
  std::string Cfg() const { return (dir_.path() / "c.cfg").string(); }
  std::string Out() const { return (dir_.path() / "out").string(); }
  std::string Ckpt() const { return (dir_.path() / "out" / "protagonist.ckpt").string(); }
  CliResult Eval(const std::string& test, std::vector<std::string> extra = {}) {
    std::vector<std::string> args = {"eval", "--config", Cfg(), "--test", test,
                                     "--checkpoint", Ckpt(), "--out", Out()};
    args.insert(args.end(), extra.begin(), extra.end());
    return RunTool(args);
  }
  TempDir dir_;
};

TEST_F(CliEval, ParetoRowCountFollowsBetaList) {
  const CliResult r = Eval("pareto", {"--beta-list", "1,10"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = ReadEvalCsv(fs::path(Out()) / "eval_pareto.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].policy_id, "protagonist");
  EXPECT_EQ(rows[0].param, "1");
  EXPECT_EQ(rows[1].param, "10");
}

TEST_F(CliEval, EveryBatteryRuns) {
  for (const char* test : {"clean", "lsc", "axle", "adversarial"}) {
    const CliResult r = Eval(test, {"--rollouts", "2"});
    EXPECT_EQ(r.code, 0) << test << ": " << r.err;
    EXPECT_TRUE(fs::exists(fs::path(Out()) / (std::string("eval_") + test + ".csv")));
  }
  EXPECT_EQ(ReadEvalCsv(fs::path(Out()) / "eval_adversarial.csv").size(), 3u);
  EXPECT_TRUE(fs::exists(fs::path(Out()) / "adversaries" / "protagonist_iter2.ckpt"));
}

TEST_F(CliEval, AppendsRows) {
  ASSERT_EQ(Eval("clean").code, 0);
  ASSERT_EQ(Eval("clean", {"--seed", "4"}).code, 0);
  EXPECT_EQ(ReadEvalCsv(fs::path(Out()) / "eval_clean.csv").size(), 2u);
}

TEST_F(CliEval, CorruptCheckpointNamesFileAndOffset) {
  const fs::path bad = dir_.path() / "bad.ckpt";
  std::string bytes = Slurp(Ckpt());
  bytes.resize(50);
  WriteText(bad, bytes);
  const CliResult r = RunTool({"eval", "--test", "clean", "--checkpoint", bad.string(), "--out", Out()});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("bad.ckpt"), std::string::npos);
  EXPECT_NE(r.err.find("offset"), std::string::npos);
}

TEST_F(CliEval, MissingCheckpointFails) {
  const CliResult r =
      RunTool({"eval", "--test", "clean", "--checkpoint", "/nonexistent.ckpt", "--out", Out()});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("not found"), std::string::npos);
}

TEST_F(CliEval, AdversaryCheckpointRejectedAsProtagonist) {
  Rng rng(1);
  const fs::path adv = dir_.path() / "adv.ckpt";
  SavePolicy(adv, MakeAdversaryPolicy({8}, rng));
  const CliResult r = RunTool({"eval", "--test", "clean", "--checkpoint", adv.string(), "--out", Out()});
  EXPECT_EQ(r.code, kExitFailure);
  Rng rng2(2);
  const fs::path wide = dir_.path() / "wide.ckpt";
  SavePolicy(wide, GaussianPolicy::Random({6, {8}, 2}, ProtagonistLow(), ProtagonistHigh(), rng2));
  const CliResult w = RunTool({"eval", "--test", "clean", "--checkpoint", wide.string(), "--out", Out()});
  EXPECT_EQ(w.code, kExitFailure);
  EXPECT_NE(w.err.find("dimensions"), std::string::npos);
}

TEST(CliReport, MergesDisjointFiles) {
  TempDir dir;
  EvalReport a{"p", "clean", "n.a.", 3, 1.0, 0.1, 0.0, 1};
  EvalReport b{"p", "pareto", "2", 3, 2.0, 0.1, 0.0, 1};
  EvalReport c{"p", "pareto", "5", 3, 3.0, 0.1, 0.0, 1};
  AppendEvalCsv(dir.path() / "eval_clean.csv", {a});
  AppendEvalCsv(dir.path() / "eval_pareto.csv", {b, c});
  std::ostringstream out, err;
  ASSERT_EQ(CmdReport(dir.path(), out, err), 0);
  EXPECT_EQ(ReadEvalCsv(dir.path() / "report.csv").size(), 3u);
  EXPECT_TRUE(err.str().empty());
}

TEST(CliReport, LatestDuplicateWins) {
  TempDir dir;
  EvalReport old{"p", "clean", "n.a.", 3, 1.0, 0.1, 0.0, 1};
  EvalReport fresh = old;
  fresh.mean_reward = 9.0;
  AppendEvalCsv(dir.path() / "eval_a.csv", {old});
  AppendEvalCsv(dir.path() / "eval_b.csv", {fresh});
  fs::last_write_time(dir.path() / "eval_a.csv",
                      fs::last_write_time(dir.path() / "eval_b.csv") - std::chrono::seconds(5));
  std::ostringstream out, err;
  ASSERT_EQ(CmdReport(dir.path(), out, err), 0);
  const auto rows = ReadEvalCsv(dir.path() / "report.csv");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].line, EvalCsvRow(fresh));
  EXPECT_NE(err.str().find("warning"), std::string::npos);
}

TEST(CliReport, EmptyDirectoryGivesHeaderOnly) {
  TempDir dir;
  const CliResult r = RunTool({"report", dir.path().string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_EQ(Slurp(dir.path() / "report.csv"), std::string(kEvalHeader) + "\n");
}

TEST(CliReport, MissingDirectoryFails) {
  EXPECT_EQ(RunTool({"report", "/nonexistent/advlane_dir"}).code, kExitFailure);
}

TEST(Csv, SchemaAndFormatting) {
  MetricRow row;
  row.iteration = 3;
  row.player = Player::kAdversary;
  row.mean_reward = 0.1;
  const std::string csv = MetricsCsv({row});
  EXPECT_EQ(csv, std::string(kMetricsHeader) + "\n3,adversary,0.10000000000000001,0,0,0,0\n");
  EvalReport r{"bad,id", "clean", "n.a.", 1, 0.0, 0.0, 0.0, 1};
  EXPECT_THROW(EvalCsvRow(r), std::runtime_error);
}

}  // namespace
}  // namespace advlane
