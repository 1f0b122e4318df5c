#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hbatk {

/// Entry point of the `hbatk` tool. `args` excludes the program name.
/// Returns 0 on success, 1 on usage/config/domain errors, 2 on numerical failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hbatk
