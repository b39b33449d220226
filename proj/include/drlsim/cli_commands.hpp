#pragma once

#include <string>
#include <vector>

namespace drlsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;     // bad flags / invalid combination
inline constexpr int kExitNumeric = 3;   // training numerical failure
inline constexpr int kExitArtifact = 4;  // checkpoint corrupt or mismatched

/// Entry point behind the `drlsim` binary; also callable in-process by tests.
/// `args` excludes the program name.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace drlsim::cli
