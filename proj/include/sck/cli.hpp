#pragma once

#include "sck/config.hpp"

#include <iosfwd>
#include <string>

namespace sck {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,  // ran, but a diagnostic is outside its limit
  kExitConfig = 2,
  kExitSolver = 3,
};

/// Runs solve | simulate | compare | verify | sweep with cfg, writing reports
/// into cfg.out. Messages go to log. Never throws; failures map to exit codes.
int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log);

}  // namespace sck
