#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace msr::cli {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIo = 2,
  kFormat = 3,
  kInternal = 4,
  kNoOverlap = 5,
  kReplayMismatch = 6,
};

// Runs one command line (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace msr::cli
