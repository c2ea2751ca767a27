#pragma once

#include <iosfwd>

#include "sep/cli/config.hpp"

namespace sep::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigError = 2, kResourceCap = 3 };

/// Writes <out>/decay.csv and <out>/decay.json.
int cmd_decay(const DecayConfig& c, const RunSettings& run, std::ostream& log);
/// Writes <out>/validate.json; kCheckFailed if any check fails.
int cmd_validate(const ValidateConfig& c, const RunSettings& run, std::ostream& log);
/// Writes <out>/trajectory.bin.
int cmd_simulate(const SimulateConfig& c, const RunSettings& run, std::ostream& log);
/// Writes <out>/oracle_compare.json; kCheckFailed if any comparison fails.
int cmd_oracle_compare(const OracleCompareConfig& c, const RunSettings& run, std::ostream& log);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace sep::cli
