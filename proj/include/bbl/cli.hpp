#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bbl::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;  ///< usage, I/O or validation error
inline constexpr int kExitFail = 2;
inline constexpr int kExitHypothesisNotMet = 3;

/// Runs the command line `args` (args[0] is the program name). Reports go to
/// `out` unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bbl::cli
