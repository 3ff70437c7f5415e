#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace risid::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Entry point shared by the `risid` binary and the tests. `args` excludes the
// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "start:step:stop" (inclusive) or a comma-separated list.
std::vector<double> parse_value_list(const std::string& text);

} // namespace risid::cli
