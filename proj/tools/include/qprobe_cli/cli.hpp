#pragma once

#include <iosfwd>

namespace qprobe::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitContract = 4;

// Runs `qprobe <command> ...`. Reports go to `out` unless --out is given;
// diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qprobe::cli
