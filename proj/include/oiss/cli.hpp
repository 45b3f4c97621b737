#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace oiss::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerdictFailed = 1;
inline constexpr int kExitUsage = 2;

// Runs `oiss <subcommand> ...`; args excludes the program name. Reports go to
// `out` (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace oiss::cli
