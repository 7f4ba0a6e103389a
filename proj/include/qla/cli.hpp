#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qla::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConfig = 3;

// Runs the command-line front end. `args` excludes the program name.
// Machine-readable output goes to `out` (or --output), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qla::cli
