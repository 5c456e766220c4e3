#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace quda::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kDataError = 3, kNumericalFailure = 4 };

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace quda::cli
