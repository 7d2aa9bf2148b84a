#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mfrc/config.hpp"

namespace mfrc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Entry point shared by the executable and the tests. Results go to files
// under the output directory and to `out`; progress and diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Loads `path` (or defaults when empty), applies `key=value` overrides and the
// environment, then validates.
RunConfig resolve_config(const std::string& path,
                         const std::vector<std::string>& overrides);

// Scans trial seeds at the configured (γ, ρ) for one multifunctional and one
// non-multifunctional instance. Returns {mf_seed, non_mf_seed}.
std::pair<std::uint64_t, std::uint64_t> find_seed_pair(const RunConfig& cfg,
                                                       const TopologySource& source,
                                                       long max_trials, std::ostream& err);

// Maps an exception from a subcommand to an exit status.
int exit_code_for(const std::exception& e);

}  // namespace mfrc::cli
