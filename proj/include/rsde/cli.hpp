#pragma once

#include <iosfwd>

namespace rsde {

/// Exit codes of the command-line front end.
enum ExitCode : int { exit_ok = 0, exit_threshold_failed = 1, exit_usage = 2 };

/// Entry point behind the `rsde` executable:
///   rsde skorohod --input path.csv [--output out.csv]
///   rsde simulate [--config f] [--set k=v]... [--path-index i] [--output out.csv]
///   rsde decompose [--config f] [--set k=v]... [--path-index i] [--output out.csv]
///   rsde study <name> [--config f] [--set k=v]... [--output-dir dir]
/// The output directory is, in order of precedence, --output-dir, the
/// RSDE_OUTPUT_DIR environment variable, then `output_dir` from the config.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rsde
