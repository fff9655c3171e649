#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace threeprimes::cli {

enum ExitCode : int {
  ok = 0,
  failure = 1,
  usage = 2,
  numeric = 3,
};

// args excludes the program name. Results go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace threeprimes::cli
