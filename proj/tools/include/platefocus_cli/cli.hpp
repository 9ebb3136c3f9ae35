#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace platefocus::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitUsage = 2,
    kExitConfig = 3,
    kExitIo = 4,
};

/// Runs the platefocus command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace platefocus::cli
