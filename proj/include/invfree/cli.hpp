#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace invfree {

// Entry point behind the binary; args exclude the program name.  Returns the
// process exit code: 0 success, 1 example deviation, 2 usage error, 3 problem
// parse error, 4 solver/certificate/numeric error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace invfree
