/// @file cli.hpp
/// @brief Command-line front end (solve, check-gradient, sweep-sigma,
/// convergence).
#pragma once

namespace hpsplines {

/// Parses arguments, runs the selected command, and returns the process exit
/// code: 0 on success, 2 on configuration errors, 3 on numeric failures.
int run_cli(int argc, const char* const* argv);

}  // namespace hpsplines
