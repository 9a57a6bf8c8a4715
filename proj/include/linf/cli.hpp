#pragma once

namespace linf {

inline constexpr const char* kVersion = "0.1.0";

/// Command-line entry point. Returns 0 on success, 1 when a verification
/// suite fails, 2 for configuration errors and 3 for numerical contract
/// violations. Output files are only written after a command succeeds.
int run_cli(int argc, char** argv);

}  // namespace linf
