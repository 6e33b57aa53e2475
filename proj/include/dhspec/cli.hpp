#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dhspec {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { exit_pass = 0, exit_failed = 1, exit_usage = 2 };

/// Runs one command line (without the program name). Artifacts go to out,
/// diagnostics to err. Returns 0 on success, 1 when a verification fails,
/// 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dhspec
