#pragma once

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace gbsc::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitDataError = 1,
  kExitUsageError = 2,
  kExitCheckFailed = 3,
};

// Entry point of the `gbsc` tool. Subcommands: train, sweep-k, importance,
// mask, oracle-check. Reports go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Parses "2", "1,3,5", "1..22" or mixtures such as "1..3,8". Throws
// ConfigError on malformed input or an empty list.
std::vector<std::size_t> parse_k_list(std::string_view text);

}  // namespace gbsc::cli
