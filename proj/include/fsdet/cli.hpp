#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fsdet/errors.hpp"

namespace fsdet::cli {

/// 0 success, 2 invalid input, 3 numerical failure, 4 I/O failure.
int exit_code(ErrorKind kind);

/// Runs one subcommand; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace fsdet::cli
