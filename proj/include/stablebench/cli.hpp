#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace stablebench::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitFailure = 2,      // I/O or benchmark failure
  kExitInfeasible = 3,   // recommendation constraint unmet
};

/// Entry point behind the stablebench binary. args excludes the program
/// name. Data goes to out; progress and `error:` lines go to err.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stablebench::cli
