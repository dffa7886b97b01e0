#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace eofsep::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 1,
  kExitNotConverged = 2,
};

/// Runs the command line `args` (without the program name). All output goes
/// to `out` and `err`; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eofsep::cli
