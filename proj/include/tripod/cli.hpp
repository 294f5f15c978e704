#pragma once

#include <string>
#include <vector>

namespace tripod {

// Command-line front end. `args` excludes the program name. Writes one
// CSV (plus a gnuplot script) per scenario into the output directory and
// returns the process exit status: 0 on success, 1 on usage or
// configuration errors, 2 on runtime failures.
int run_command(const std::vector<std::string>& args);

}  // namespace tripod
