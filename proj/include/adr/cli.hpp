#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace adr::cli {

/// Runs one command line (without the program name) and returns the exit
/// code: 0 ok, 2 input, 3 numeric, 4 scale exceeded.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adr::cli
