#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rankatlas {

/// Runs one command line (without the program name). Returns 0 on success,
/// 2 on usage or input errors and 1 for Inconclusive under --strict.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rankatlas
