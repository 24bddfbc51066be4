#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ngr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitConvergence = 4;

/// Entry point of the `ngr` tool; never throws, returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ngr::cli
