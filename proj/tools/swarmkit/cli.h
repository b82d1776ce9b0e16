#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace swarmkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // validation breach or failed run
inline constexpr int kExitUsage = 2;    // bad flags or bad input files

// Entry point shared by main() and the tests. `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace swarmkit::cli
