#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace shexi::cli
{

/// Exit codes shared by every subcommand.
enum Exit : int {
  ok = 0,
  input_error = 1,     // unreadable file, parse error, bad flags
  ill_defined = 2,     // schema rejected by the well-definedness check
  non_conformant = 3,  // some requested pair is not in the maximal typing
  oracle_mismatch = 4  // refinement and exhaustive oracle disagree
};

/// Runs one subcommand; `args` excludes the program name.
int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err);

}  // namespace shexi::cli
