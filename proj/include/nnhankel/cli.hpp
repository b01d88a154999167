#pragma once

#include <string>
#include <vector>

namespace nnh {

/// Entry point behind the nnhankel binary; exposed so tests can drive the
/// subcommands in-process. Returns the process exit code:
/// 0 success, 2 parse/flag error, 3 invalid eigenpair, 4 solver
/// non-convergence, 5 verification failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace nnh
