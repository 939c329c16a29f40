#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tonebias {

// Runs one subcommand; `args` excludes the program name. Returns 0 on
// success, 1 on a validation error, 2 on any other failure. Failures print
// one `ERROR <code>: <detail>` line to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tonebias
