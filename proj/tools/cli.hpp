#pragma once

namespace upasim::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kValidation = 2, kMonitorFailure = 3, kInternal = 4 };

/// Entry point of the `upasim` executable. Diagnostics go to stderr.
int run_cli(int argc, char** argv);

}  // namespace upasim::cli
