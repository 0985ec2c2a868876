#pragma once

#include <string>
#include <vector>

namespace dpmvar::cli {

inline constexpr const char* kVersion = "1.0.0";

// Parses the arguments (program name first) and runs the chosen subcommand. Returns the exit status.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace dpmvar::cli
