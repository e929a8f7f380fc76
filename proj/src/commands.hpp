#pragma once

#include <string>
#include <vector>

namespace panogeo {

// Full command-line entry point. Returns the process exit code:
// 0 success, 1 usage error, 2 data error, 3 verification failure.
int run_cli(int argc, const char* const* argv);

// Convenience wrapper for in-process invocation; args exclude the program
// name, e.g. {"verify", "geometry"}.
int run_cli(const std::vector<std::string>& args);

}  // namespace panogeo
