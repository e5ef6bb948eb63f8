#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "netreduce/error.hpp"

namespace netreduce {

/// 0 success, 1 usage, 2 configuration, 3 data, 4 infeasible strategy.
int exit_code_for(const Error& e);

/// Runs one subcommand. `args` excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace netreduce
