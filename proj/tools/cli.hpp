#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ringrep::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitResource = 3;

// Runs one command line (without the program name). Data goes to `out` unless --out or
// RINGREP_OUT_DIR redirects it to a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ringrep::cli
