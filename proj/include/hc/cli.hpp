#pragma once

#include <iosfwd>

namespace hc {

/// Process exit codes; stable across versions.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,    // unexpected failure (a bug)
  kExitConfig = 2,      // bad flags, config file or parameters
  kExitCapacity = 3,    // grid depth or retention cap exceeded
  kExitViolations = 4,  // a scan found violations
};

/// Entry point of the hcouple tool: subcommands couple, scan, scaling.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hc
