#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace adeq::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kInfeasible = 2,
  kNotConverged = 3,
  kVerification = 4,
};

/// Runs one command in-process. `args` excludes the program name. The JSON
/// report goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adeq::cli
