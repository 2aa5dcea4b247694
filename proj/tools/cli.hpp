#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace reception::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kMissingInput = 2,
  kBackendTransport = 3,
};

// Runs the command line (without the program name). Diagnostics go to `err`,
// progress to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace reception::cli
