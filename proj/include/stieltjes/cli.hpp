#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stieltjes {

// Exit codes: 0 success (certified fit, feasible data), 1 uncertified or
// infeasible, 2 input or usage error. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stieltjes
