#pragma once

#include <string>
#include <vector>

namespace netinf::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kUsage = 2, kDataError = 3, kNumerical = 4 };

/// Entry point for the `netinf` tool. Returns the process exit code.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace netinf::cli
