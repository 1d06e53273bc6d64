#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bifree::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kInputError = 2, kInconclusive = 3 };

/// Runs one command line; `args` excludes the program name. Reports go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bifree::cli
