#pragma once

#include <iosfwd>

namespace apk {

/// Exit codes of the command-line front end.
enum ExitCode : int {
    exit_ok = 0,
    exit_verify_failed = 1,
    exit_config_error = 2,
    exit_not_uniformly_discrete = 3,
    exit_window_error = 4,
};

/// Entry point of the `apk` tool. Data goes to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace apk
