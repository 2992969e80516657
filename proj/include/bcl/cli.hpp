#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bcl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line; args[0] is the program name. Output that is not
/// redirected with --out goes to `out`, diagnostics to `err`.
///
/// Exit codes: 0 success, 1 a non-vacuous check failed (or a numerical
/// failure), 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bcl::cli
