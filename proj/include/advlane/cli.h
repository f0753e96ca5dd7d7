#ifndef ADVLANE_CLI_H_
#define ADVLANE_CLI_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "advlane/config.h"
#include "advlane/eval.h"
#include "advlane/trainers.h"

namespace advlane {

// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Marker file present in an output directory while a command is writing it.
inline constexpr const char* kIncompleteMarker = "INCOMPLETE";

inline constexpr const char* kMetricsHeader =
    "iteration,player,mean_reward,failure_rate,mean_abs_d_accel,mean_abs_d_steer,wall_time_s";
inline constexpr const char* kEvalHeader =
    "policy_id,test_id,param,n_rollouts,mean_reward,stderr,failure_rate,seed";

std::string FormatDouble(double v);
std::string MetricsCsv(const std::vector<MetricRow>& rows);
std::string EvalCsvRow(const EvalReport& r);

// Writes to a sibling temporary file, then renames over `path`.
void WriteFileAtomic(const std::filesystem::path& path, const std::string& contents);

// Creates `path` with a header if needed and appends the rows.
void AppendEvalCsv(const std::filesystem::path& path, const std::vector<EvalReport>& reports);

struct EvalCsvRecord {
  std::string policy_id;
  std::string test_id;
  std::string param;
  std::string line;  // the full row as written
};

// Parses an evaluation CSV. Throws std::runtime_error on a schema mismatch.
std::vector<EvalCsvRecord> ReadEvalCsv(const std::filesystem::path& path);

enum class TrainMode { kBaseline, kRarl, kNfsp };
enum class EvalTest { kPareto, kAdversarial, kLsc, kAxle, kClean };

std::optional<TrainMode> ParseTrainMode(const std::string& s);
std::optional<EvalTest> ParseEvalTest(const std::string& s);
const char* EvalTestName(EvalTest t);

// The commands return an exit status and report progress and errors on the
// given streams. Output paths come from cfg.run.out_dir.
int CmdTrain(const ExperimentConfig& cfg, TrainMode mode, std::ostream& out, std::ostream& err);
int CmdEval(const ExperimentConfig& cfg, const std::filesystem::path& checkpoint, EvalTest test,
            std::ostream& out, std::ostream& err);
int CmdReport(const std::filesystem::path& dir, std::ostream& out, std::ostream& err);

// Full command-line entry point: "train", "eval" and "report" subcommands.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace advlane

#endif  // ADVLANE_CLI_H_
