#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace nef::cli {

inline constexpr std::uint64_t kDefaultSeed = 11;

enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kNumericalFailure = 3,  // partial output was still written
};

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nef::cli
