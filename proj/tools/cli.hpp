#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cparls::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

/// Runs the command line `args` (without the program name), writing normal
/// output to `out` and diagnostics to `err`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses a --tau value: "1/s" resolves to 1 / samples, anything else must
/// be a number in (0, 1]. Throws std::invalid_argument otherwise.
double parse_tau(const std::string& text, std::size_t samples);

}  // namespace cparls::cli
