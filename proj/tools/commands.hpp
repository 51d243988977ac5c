#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace psconv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitPaperBreach = 3;

inline constexpr const char* kToolVersion = "0.1.0";

/// Runs one command line (without the program name). Normal output goes to
/// `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace psconv::cli
