// Command-line front end. Kept in a library so tests can drive it in-process.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace opsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitInvalid = 2;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace opsim
