#pragma once

#include <string>
#include <vector>

namespace vltrack::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitUsage = 2;

/// Entry point shared by the executable and the tests. Subcommands: track,
/// eval, gensamples, trace, make-fixture.
int run(int argc, const char* const* argv);

/// Convenience overload; argv[0] is supplied.
int run(const std::vector<std::string>& args);

}  // namespace vltrack::cli
