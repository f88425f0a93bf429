#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace patent_rent::cli {

/// Process exit statuses; a stable contract for scripts.
enum ExitCode : int {
  kSuccess = 0,
  kInputError = 2,
  kComputationError = 3,
  kInternalError = 4,
};

/// Runs one `patent-rent` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace patent_rent::cli
