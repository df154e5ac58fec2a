#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace minmax::cli {

/// Exit codes of the minmax tool.
enum ExitCode : int {
  kOk = 0,         // solve reached a local minmax; bench soundness held; mpc finished
  kError = 1,      // runtime failure
  kOther = 2,      // solve ended anywhere else
  kUsage = 64,     // bad flags, unknown problem, bad config
};

/// Parses argv and runs one subcommand (solve, bench or mpc).
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Same, from a vector of arguments without the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace minmax::cli
