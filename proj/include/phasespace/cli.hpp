#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace phasespace {

// Exit codes of the psq tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumeric = 2, kExitIo = 3 };

// Runs `psq <subcommand> ...`; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phasespace
