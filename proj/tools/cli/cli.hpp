#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace parmine::cli {

/// Runs one invocation. `args` excludes the program name. Returns the exit
/// status: 0 success, 1 usage or config, 2 data, 3 provider.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace parmine::cli
