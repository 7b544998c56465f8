#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mfgp::cli {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,     // unexpected failure
  kUsage = 2,        // bad flags, invalid arguments, unmet preconditions
  kData = 3,         // unreadable or malformed input files
  kNumerical = 4,    // fit failure or singular covariance
  kUnsupported = 5,  // request refused by the model contract
};

/// Environment variable that replaces "." as the default output directory.
inline constexpr const char* kOutputDirEnv = "MFGP_OUTPUT_DIR";

/// Runs the tool; argv[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mfgp::cli
