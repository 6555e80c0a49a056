#pragma once
// Command-line front end: solve | lloyd | compare | plot.

#include <ostream>

namespace polycover {

enum ExitCode : int {
    ExitOk = 0,
    ExitFailure = 1,     ///< unexpected runtime error
    ExitConfigError = 2, ///< bad arguments, config or polynomial syntax, missing inputs
    ExitStrictFailure = 3,
};

/// Verdict threshold for Lloyd endpoints against the certified minimum.
inline constexpr double kGlobalGap = 1e-6;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace polycover
