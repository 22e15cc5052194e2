#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gfbp::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode { Ok = 0, InputFailure = 2, ToleranceFailure = 3, BudgetFailure = 4 };

// Runs one command line (args excludes the program name) and returns the
// exit code.  Results go to `out` unless redirected to files, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gfbp::cli
