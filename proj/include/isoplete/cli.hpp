#pragma once

namespace isoplete {

// Command-line entry: diagnose / complete / forecast / bench subcommands.
// Returns 0 on success, 2 on usage errors, 1 on runtime failures.
int cli_main(int argc, const char* const* argv);

}  // namespace isoplete
