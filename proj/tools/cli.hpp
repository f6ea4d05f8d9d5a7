#pragma once

#include <ostream>
#include <string>

namespace wavedelay::cli {

enum ExitCode { kOk = 0, kUsage = 1, kNumerical = 2 };

/// Entry point of the `wavedelay` tool; output goes to out/err so tests can
/// capture it. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Shortest representation that round-trips, capped at 12 significant digits.
/// -0 prints as 0.
std::string format_real(double x);

}  // namespace wavedelay::cli
