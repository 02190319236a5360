#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "isorec/error.hpp"

namespace isorec {

/// 0 ok, 1 verify found failures, 2 bad input, 3 out of range, 4 anything else.
int exit_code_for(ErrorCode code) noexcept;

/// Runs one subcommand. `args` excludes the program name. The report JSON goes
/// to `out`; errors go to `err` as {"error", "message", "exit_code"}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace isorec
