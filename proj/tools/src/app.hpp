#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ecnav::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitDomain = 4;

/// Parses arguments (without the program name) and runs one subcommand.
/// Returns the process exit status.
int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ecnav::cli
