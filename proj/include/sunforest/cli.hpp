#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sunforest {

/// Dispatches one CLI invocation (argv without the program name).
/// Exit codes: 0 success/pass, 1 verification failure, 2 usage or parse
/// error, 3 step budget exceeded.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sunforest
