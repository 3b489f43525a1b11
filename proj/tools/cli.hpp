#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace consel::cli {

/// Runs the command line `args` (without the program name). Returns the
/// process exit code; human-readable output goes to `out`, errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace consel::cli
