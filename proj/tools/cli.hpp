#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace convspectra::cli {

/// Exit codes of the conv-spectra tool.
enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kValidationError = 2,
  kNumericalFailure = 3,
};

/// Oracle agreement threshold used by `oracle-check`.
inline constexpr double kOracleTolerance = 1e-8;

/// Runs the tool with `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace convspectra::cli
