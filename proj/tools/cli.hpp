#pragma once

#include <iosfwd>

namespace spherekde::cli {

enum ExitCode : int {
  kOk = 0,
  kUnexpected = 1,
  kUsage = 2,
  kData = 3,
  kNumerical = 4,
};

/// Runs one command. Reports go to `out` when no --out file is given;
/// diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spherekde::cli
