#pragma once

#include "ddibp/runconfig.hpp"

namespace ddibp {

// Subcommand entry points. Return a process exit code:
// 0 success, 1 usage/configuration error, 2 verification failure.
int cmd_simulate(const RunConfig& config);
int cmd_fit(const RunConfig& config);
int cmd_impute(const RunConfig& config);
int cmd_verify(const RunConfig& config);
int cmd_sharing(const RunConfig& config);

// Validates and dispatches on config.subcommand, translating exceptions into
// diagnostics and exit codes.
int run_command(const RunConfig& config);

}  // namespace ddibp
