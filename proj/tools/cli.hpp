#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace frbl::cli {

// Exit codes shared by every command.
inline constexpr int kHolds = 0;
inline constexpr int kFails = 1;
inline constexpr int kInputError = 2;

// Runs one command line (without the program name). Reports go to `out`
// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace frbl::cli
