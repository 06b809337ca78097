#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace probinc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInconsistent = 1;
inline constexpr int kExitError = 2;

/// Runs the command line `args` (args[0] is the program name).
/// Reports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace probinc::cli
