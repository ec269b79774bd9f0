#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace idm::cli {

inline constexpr const char* kToolName = "idmtp";
inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,         // bad flags, malformed input CSV or config
  kAllFailed = 3,     // every requested estimate failed
  kAllDegenerate = 4, // every simulated replication degenerated
};

/// Runs `idmtp <subcommand> ...`; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Hex SHA-256 of a file's bytes.
std::string file_sha256(const std::string& path);

}  // namespace idm::cli
