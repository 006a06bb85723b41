#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kinkfold::cli {

// Exit codes: 0 success, 1 usage, 2 input error, 3 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kinkfold::cli
