#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kamtori {

enum ExitCode : int { kExitPass = 0, kExitFailure = 1, kExitUsage = 2 };

/// Runs one subcommand (solve | verify | smooth | diophantine | run). `args`
/// excludes the program name. Every subcommand writes config.json and
/// certificate.json into the output directory before returning.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

}  // namespace kamtori
