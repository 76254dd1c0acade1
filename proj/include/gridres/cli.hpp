#pragma once

namespace gridres {

// Command-line front end. Subcommands: train, evaluate, exact-dp, strategy,
// inspect, actions. Returns 0 on success, 1 on input errors, 2 on numerical
// failures; all diagnostics go to stderr.
int run_cli(int argc, const char* const* argv);

}  // namespace gridres
