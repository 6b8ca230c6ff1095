#pragma once

namespace oclb {

// Entry point for the command-line tool. Subcommands: bound, forge,
// verify, run, table. Returns 0 on success, 1 on validation failures,
// 2 on usage errors, 3 on internal errors.
int run_cli(int argc, const char* const* argv);

}  // namespace oclb
