#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tracerec {

/// Runs one `tracerec` subcommand. `args` excludes the program name.
/// Returns 0 on success, 1 on invalid input or usage, 2 on I/O failure.
/// Warnings and diagnostics go to `err`.
int run_command(std::vector<std::string> args, std::ostream& out, std::ostream& err);

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tracerec
