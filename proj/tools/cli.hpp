#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vgfkit::cli {

enum ExitCode : int {
  kOk = 0,
  kParse = 2,
  kDims = 3,
  kCertification = 4,
  kSolver = 5,
};

// Runs one invocation. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vgfkit::cli
