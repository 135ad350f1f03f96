#pragma once

// The bellmix command-line tool as a library function, so tests can drive it
// without spawning processes.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace bellmix::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,  // a reference fixture check failed
  kConfigError = 2,
  kDataError = 3,
  kNotConverged = 4,
};

struct Environment {
  std::optional<std::string> seed;  // BELLMIX_SEED
};

/// Reads BELLMIX_SEED from the process environment.
Environment process_environment();

/// Runs one invocation; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const Environment& env = {});

}  // namespace bellmix::cli
