#pragma once

#include <string>
#include <vector>

namespace lev2d {

// Exit codes shared by every subcommand.
enum CliExit : int {
    cli_ok = 0,
    cli_bad_args = 2,
    cli_unstable = 3,
    cli_fit_failure = 4,
    cli_io_error = 5,
};

// Full command-line surface (simulate, asymmetry, occupancy, fit, regress,
// sweep, psd, normalize).  Reads config + flags, writes CSV/JSON artifacts to
// --out-dir, returns a CliExit code.  Identical arguments and seed produce
// byte-identical artifacts.
int cli_dispatch(const std::vector<std::string>& args);

} // namespace lev2d
