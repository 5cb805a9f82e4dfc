#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dssat::cli {

enum ExitCode : int {
    success = 0,
    answered_no = 1,
    input_error = 2,
    resource_cap = 3,
};

/// Runs one command. `args` excludes the program name. Results go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dssat::cli
