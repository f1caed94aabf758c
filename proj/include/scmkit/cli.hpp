#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace scmkit::cli {

// args excludes the program name. Exit codes: 0 success / true, 1 false,
// 2 usage or model error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scmkit::cli
