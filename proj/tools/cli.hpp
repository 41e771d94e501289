#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace intdim::cli {

/// Runs the `intdim` command line (args exclude the program name). Reports
/// go to `out`, diagnostics to `err`. Returns the process exit status:
/// 0 success, 2 configuration error, 3 validation or I/O error, 4 degenerate
/// data.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace intdim::cli
