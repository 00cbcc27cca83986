#pragma once

#include "grasspod/io.hpp"
#include "grasspod/pdelab.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace grasspod {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitCaseFailures = 2;
inline constexpr int kExitNoOp = 3;

/// Flags common to the subcommands. Unset optionals keep the config value.
struct CommandOptions {
  std::optional<std::string> config;
  std::optional<std::string> problem;
  std::optional<std::uint64_t> seed;
  std::optional<Index> rank;
  std::optional<std::string> method;
  std::optional<std::string> out;
  std::optional<int> folds;

  std::string manifest;
  std::string model;
  std::vector<double> theta;
  std::vector<std::string> inputs;  ///< import: CSV files, or one list file with --list
  bool list = false;                ///< import: inputs[0] lists "path,theta..." rows
  std::string output;               ///< import single-file target / predict basis target
};

/// Config file (or problem defaults), then flag overrides. `fallback_problem`
/// picks the defaults when neither a config nor --problem is given.
RunConfig resolve_config(const CommandOptions& opt, const std::string& fallback_problem = "burgers");

/// Methods named by a --method value ("both" = cxgb and interp).
std::vector<Method> methods_for(const std::string& name);

/// Grid points for a problem, honouring a grid override.
std::vector<GridPoint> problem_grid(const RunConfig& cfg);

/// Runs the problem's solver at one grid point.
SnapshotMatrix simulate(const RunConfig& cfg, const Vector& theta);

/// Cases named by a manifest, with POD at `rank`.
std::vector<CaseData> load_cases(const Manifest& m, Index rank);

int cmd_generate(const CommandOptions& opt, std::ostream& log);
int cmd_import(const CommandOptions& opt, std::ostream& log);
int cmd_pod(const CommandOptions& opt, std::ostream& log);
int cmd_train(const CommandOptions& opt, std::ostream& log);
int cmd_predict(const CommandOptions& opt, std::ostream& log);
int cmd_evaluate(const CommandOptions& opt, std::ostream& log);
int cmd_cv(const CommandOptions& opt, std::ostream& log);
int cmd_report(const CommandOptions& opt, std::ostream& log);

}  // namespace grasspod
