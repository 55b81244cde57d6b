#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lens::cli {

/// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitIncomplete = 2;
inline constexpr int kExitCaustic = 3;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitUnequalDegrees = 65;

/// Runs the front end on `args` (without the program name). Reports go to
/// `out` unless --output names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lens::cli
