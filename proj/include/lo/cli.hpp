#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lo {

// Exit codes.
inline constexpr int kExitSafe = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitViolation = 2;
inline constexpr int kExitUnknown = 3;

/// Runs the `lo` command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace lo
