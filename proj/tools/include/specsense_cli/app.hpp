#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace specsense::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// Parses `args` (without the program name), runs the subcommand and
/// returns the process exit code. Settings are resolved in order:
/// defaults, --config file, SPECSENSE_SEED, --set overrides, --seed/--out/--threads.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace specsense::cli
