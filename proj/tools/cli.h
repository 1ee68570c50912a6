#ifndef CUSPWIND_TOOLS_CLI_H_
#define CUSPWIND_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "cuspwind/schottky.h"

namespace cuspwind::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationFailure = 1,
  kNumericalFailure = 2,
  kUsageError = 3,
};

// Per-axis "start:stop:step" joined by 'x'; Cartesian product in row-major
// order (last axis fastest). Throws std::invalid_argument on a malformed
// spec, a non-positive step or start > stop.
std::vector<std::vector<double>> ParseGrid(const std::string& spec);

// Comma-separated numbers.
std::vector<double> ParseList(const std::string& text);

// "preset:NAME" or a path to a JSON config.
GroupPresentation LoadConfig(const std::string& config);

// args excludes the program name. Results go to `out` (or --out), one-line
// diagnostics to `err`.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cuspwind::cli

#endif  // CUSPWIND_TOOLS_CLI_H_
