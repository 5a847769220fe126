#pragma once

#include <iosfwd>

namespace dualrdm::cli {

/// Exit codes shared by all subcommands.
enum ExitCode : int {
  kSuccess = 0,
  kCheckFailed = 1,
  kInputError = 2,
  kNotConverged = 3,
  kNumericalError = 4,
};

/// Entry point of the `dualrdm` tool. Results go to `out` (or --output),
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dualrdm::cli
