#pragma once

namespace datalens::cli {

// Parses argv and executes one subcommand. Failures surface as a one-line
// JSON object {"kind", "message"} on stderr and a nonzero exit code.
int run_cli(int argc, char** argv);

} // namespace datalens::cli
