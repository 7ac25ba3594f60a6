#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace folsing::cli {

enum ExitCode : int {
  kSuccess = 0,
  kFailVerdict = 1,
  kInputError = 2,
  kInternalError = 3,
};

/// Runs one command line (without the program name). Reports go to `out`
/// (or the file named by --out), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace folsing::cli
