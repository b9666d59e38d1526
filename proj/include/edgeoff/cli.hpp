#pragma once

#include <string>
#include <vector>

namespace edgeoff {

// Full command-line front end. `args` excludes the program name.
// Exit codes: 0 success, 1 runtime failure, 2 bad config/usage,
// 3 infeasible calibration, 4 oversized exhaustive search space.
int run_cli(const std::vector<std::string>& args);

}  // namespace edgeoff
