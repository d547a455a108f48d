// Command implementations. Each returns the CSV report and an exit status;
// the report starts with the line "# qsrc-compress v1".
#pragma once

#include <string>

#include "qsrc/cli/experiment_config.hpp"

namespace qsrc::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitConfig = 2,
  kExitProperty = 3,
  kExitResourceCap = 4,
};

struct CommandResult {
  std::string csv;
  int exit_code = kExitOk;
  std::string message;  // one-line summary for stderr when exit_code != 0
};

CommandResult cmd_holevo(const ExperimentConfig& cfg);
CommandResult cmd_binary_smin(const ExperimentConfig& cfg);
CommandResult cmd_rd_sweep(const ExperimentConfig& cfg);
CommandResult cmd_props(const ExperimentConfig& cfg);
CommandResult cmd_protocol(const ExperimentConfig& cfg);

/// Dispatches on cfg.kind.
CommandResult run_command(const ExperimentConfig& cfg);

/// %.12g, "inf" / "-inf" for infinities. Throws std::logic_error on NaN.
std::string format_number(double x);

}  // namespace qsrc::cli
