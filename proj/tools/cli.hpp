#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace yaoyao::cli {

enum ExitCode : int { kPass = 0, kCheckFailure = 1, kInputError = 2, kSolverFailure = 3 };

/// Runs one `yaoyao` subcommand. Results go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace yaoyao::cli
