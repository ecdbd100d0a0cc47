#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mpsehmm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable overriding the default dense-size cap.
inline constexpr const char* kSizeCapEnv = "MPSEHMM_SIZE_CAP";

/// argv[0] is the program name. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience form without the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mpsehmm::cli
