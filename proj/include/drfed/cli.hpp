#pragma once

// Command-line entry point. Subcommands: run (seeded experiment batch),
// sweep (one parameter over a value list), oracle (exact small-M graph
// facts), mixing (chain-vs-uniform TV distances). Exit codes: 0 success,
// 2 invalid configuration/arguments (message names the offending key),
// 3 runtime failure.

namespace drfed {

int run_cli(int argc, char** argv);

}  // namespace drfed
