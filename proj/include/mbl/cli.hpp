#pragma once

// The mbl-memory command line: trace, sweep, collapse, validate-config.
//
// Exit codes: 0 success, 1 analysis error, 2 config or usage error,
// 3 more than 10% of realizations failed.

#include <iosfwd>
#include <string>
#include <vector>

namespace mbl::cli {

inline constexpr int exit_ok              = 0;
inline constexpr int exit_analysis_error  = 1;
inline constexpr int exit_config_error    = 2;
inline constexpr int exit_partial_failure = 3;

inline constexpr double failure_threshold = 0.10;

inline constexpr const char *tool_name    = "mbl-memory";
inline constexpr const char *tool_version = "0.1.0";

inline int exit_code_for_failures(double failure_fraction) {
    return failure_fraction > failure_threshold ? exit_partial_failure : exit_ok;
}

// args excludes the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace mbl::cli
