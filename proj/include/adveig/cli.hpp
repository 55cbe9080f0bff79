#pragma once
// Command-line front end: solve | sweep | verify | minmax | bound | limit |
// counterexample | gradflow, each driven by a config file. Exit status 0 on
// all-pass, 2 on assertion/solver failure, 1 on usage or config errors.

#include <string>
#include <vector>

namespace adveig {

int run_command(int argc, const char* const* argv);
int run_command(const std::vector<std::string>& args);  // args without argv[0]

}  // namespace adveig
