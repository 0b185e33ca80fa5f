#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace cst::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 2,
  kData = 3,
  kNumerical = 4,
};

/// Runs the `cst` command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace cst::cli
