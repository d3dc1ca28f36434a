#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace getzler::cli {

enum ExitCode : int { kSuccess = 0, kVerificationFailed = 1, kInputError = 2 };

/// Parses the command line and runs one command. Never throws; reports through `err` and the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace getzler::cli
