#pragma once

// Command dispatch behind the heisflow binary.  run_command is callable
// in-process so tests can produce artifacts twice and compare bytes.

#include "heis/reports.hpp"

namespace heis {

// kind: verify | flow | potential | construct | iterate | metric.
// Writes <kind>_report.json plus command-specific CSVs under out_dir.
// Returns 0 on success, 1 when a verification or budget check fails.
int run_command(const std::string& kind, Json config, const std::string& out_dir);

// Full argv driver: subcommands with --config/--seed/--out/--filter.
// Exit codes: 0 success, 1 failed checks or diverged evaluations, 2 bad
// usage or malformed config.
int run_cli(int argc, const char* const* argv);

}  // namespace heis
