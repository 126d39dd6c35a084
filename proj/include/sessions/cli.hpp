#ifndef SESSIONS_CLI_HPP
#define SESSIONS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace sessions {

/// Exit codes shared by every subcommand.
enum Exit : int {
    ExitOk = 0,
    ExitTypeError = 1,
    ExitMismatch = 2,
    ExitInput = 3,
    ExitRuntimeError = 4,
    ExitStalled = 5,
};

/// Runs the command line `sessions <args...>`; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sessions

#endif // SESSIONS_CLI_HPP
