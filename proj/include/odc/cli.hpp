#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace odc::cli {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitIo = 2 };

std::string_view version();

/// Runs one command line (without the program name). Results go to `out`,
/// usage text and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace odc::cli
