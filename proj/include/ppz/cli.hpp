#pragma once

#include <ostream>

namespace ppz {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitNoZeros = 1,  // also: a repro case failed
  kExitUsage = 2,
  kExitEvaluation = 3,
};

/// Entry point of the `ppz` tool. Results go to `out` (or --out), messages
/// to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ppz
