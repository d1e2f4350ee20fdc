// slipctl front end.
#pragma once

#include "slip/config.hpp"

#include <string>

namespace slip {

enum ExitCode : int { kOk = 0, kConfig = 1, kSolver = 2, kBudget = 3, kCheckFailed = 4 };

/// Runs one command on a parsed configuration; errors are mapped to exit codes.
int run_command(const std::string& command, const RunConfig& config);

int run_cli(int argc, char** argv);

}  // namespace slip
