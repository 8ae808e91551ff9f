#pragma once

#include <iosfwd>

namespace cptquit::cli {

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInfeasible = 2;

/// Parses argv (argv[0] is the program name), runs the subcommand and returns
/// the exit code. Results go to --output (written atomically) or to `out`;
/// diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cptquit::cli
