#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qes::cli {

enum ExitCode { ok = 0, usage = 2, numerical = 3, conjecture = 4 };

/// Runs the command line (without the program name). Primary output goes to
/// `out` unless --out names a directory; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qes::cli
