#pragma once

#include <iosfwd>

namespace lyap::cli {

/// Runs the command line tool in-process. Exit codes: 0 success, 1 failed
/// reproduce check, 2 configuration or usage error, 3 empty Bowen-ball sample.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lyap::cli
