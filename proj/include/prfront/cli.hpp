#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace prfront::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInvalid = 3;
inline constexpr int kExitInfeasible = 4;

/// Runs one subcommand (estimate, explore, simulate, report). `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace prfront::cli
