#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace logbarrier::cli {

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;

// Runs the front end on `args` (args[0] is the program name).
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace logbarrier::cli
