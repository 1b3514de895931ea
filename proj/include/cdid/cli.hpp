#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cdid::cli {

/// Runs one command line (without the program name). Returns 0 on success,
/// 2 on validation or input errors, 1 on unexpected failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cdid::cli
