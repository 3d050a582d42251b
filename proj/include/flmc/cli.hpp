#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flmc {

/// Entry point of the flmc command-line tool. args excludes the program name.
/// Returns 0 on success, 2 on usage errors, 1 on runtime failures.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flmc
