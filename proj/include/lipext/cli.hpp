#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lipext::cli {

// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kNotMember = 2,
  kNotExtreme = 3,
  kOracleDisagreement = 4,
  kVerificationFailure = 5,
};

/// Runs the command line `args` (args[0] is the program name). Documents go
/// to `out`; diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace lipext::cli
