#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hnet {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (without the program name). Results go to `out`,
/// diagnostics to `err`. Returns 0, 2 for usage or data errors, 1 for
/// numeric failures.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hnet
