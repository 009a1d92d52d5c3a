#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chokeflow::cli {

// Exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;  // I/O, schema or numerical failure
inline constexpr int exit_usage = 2;  // bad command line

// Commands: profile, forward, estimate, sweep. Output files are written only
// after every result is computed; a failure removes anything already written.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chokeflow::cli
