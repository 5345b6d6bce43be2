#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ekrylov::cli {

/// Parses the command line, runs one subcommand and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ekrylov::cli
