#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mirrax::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitIo = 4;

/// Runs one command; args exclude the program name. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mirrax::cli
