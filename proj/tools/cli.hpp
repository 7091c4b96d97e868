#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sbadmm::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;   // bad arguments, config or parameters
inline constexpr int kExitSolver = 3;  // solver abort or divergence
inline constexpr int kExitIo = 4;      // artifact could not be written

/// `args` excludes the program name. Human-readable output goes to `out`,
/// diagnostics to `err`; files are written only under --output-dir.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace sbadmm::cli
