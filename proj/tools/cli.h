#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dtsim {

// Exit codes of the dtsim tool.
inline constexpr int kExitOk = 0;  // success, or MAYBE_SECURE
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitInsecure = 3;

// Runs one dtsim invocation; `args` excludes the program name.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

}  // namespace dtsim
