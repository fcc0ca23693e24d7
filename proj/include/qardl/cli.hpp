#pragma once

namespace qardl {

// Full command-line driver (describe, unitroot, fit-ardl, fit-qardl, fit,
// simulate, report). Returns the process exit code: 0 success, 2 config
// error, 3 data error, 4 estimation error. Errors additionally emit one
// single-line JSON record on stderr.
int run_cli(int argc, const char* const* argv);

}  // namespace qardl
