#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cph {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAnalysisFailure = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `cph` tool; args exclude the program name.
// Subcommands: check, tree, sigma, index, analyze, simulate, codegen, selftest.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cph
