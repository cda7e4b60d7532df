#pragma once

namespace varwidth {

// Command-line front end. Subcommands: solve-b, efficiency-curve,
// coverage-audit, tau-max, figure-profile, theorem1, theorem2.
// Returns 0 on success, 2 on usage errors, 3 on numeric failures (with a
// machine-readable JSON error record on stderr). Relative output paths are
// resolved under $VARWIDTH_OUT_DIR when it is set.
int run_cli(int argc, const char* const* argv);

}  // namespace varwidth
