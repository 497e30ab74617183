#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rolefinder::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitInternal = 3;

// Runs one command line (without the program name). Errors are reported on
// `err` and mapped to the exit codes above.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rolefinder::cli
