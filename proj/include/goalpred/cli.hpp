// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "goalpred/error.hpp"

namespace goalpred {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,      // bad or missing flags, unknown names
  kExitIo = 3,         // missing or unwritable files
  kExitParse = 4,      // malformed dataset or model file
  kExitInvariant = 5,  // well-formed input violating a data invariant
  kExitNumeric = 6,    // degenerate geometry or statistics
  kExitTraining = 7,   // divergence during training
};

int exit_code_for(ErrorKind kind) noexcept;

/// Runs the command line. Results go under --out; diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

std::vector<std::string> subcommand_names();
/// Long flag names (with leading dashes) accepted by a subcommand.
std::vector<std::string> subcommand_flags(std::string_view subcommand);
/// The text printed by `goalpred <subcommand> --help`.
std::string subcommand_help(std::string_view subcommand);

}  // namespace goalpred
