#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace perflab {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitViolated = 3, kExitInconclusive = 4, kExitIo = 5 };

/// Runs the command line front end on `args` (program name excluded) and
/// returns the process exit code. Human-readable output goes to `out`,
/// diagnostics to `err`; machine output goes to files under --out.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace perflab
