#pragma once

namespace bregmanot {

// Command-line front end; returns the process exit code:
// 0 converged, 2 solver hit its iteration cap, 1 input/usage errors.
int run_cli(int argc, const char* const* argv);

}  // namespace bregmanot
