#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace conesta::cli {

enum ExitCode : int {
  kOk = 0,
  kInvalidArgument = 2,
  kNumericalFailure = 3,
};

// Runs the `conesta` command line. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace conesta::cli
