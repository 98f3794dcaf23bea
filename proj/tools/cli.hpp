#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace okr::cli {

enum ExitCode : int {
    kOk = 0,
    kVerificationFailed = 1,
    kUsageError = 2,
    kIoError = 3,
    kNumericalError = 4,
};

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace okr::cli
