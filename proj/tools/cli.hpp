#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace viewaug::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Worker count override read when --workers is not given.
inline constexpr const char* kWorkersEnv = "VIEWAUG_WORKERS";

/// Runs the tool with `args` (program name excluded). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace viewaug::cli
