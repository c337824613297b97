#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qsyn::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInfeasible = 2,
  kExitNumerical = 3,
  kExitCheckFailed = 4,
};

/// Entry point shared by the executable and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qsyn::cli
