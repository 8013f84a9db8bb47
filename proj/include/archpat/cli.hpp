#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "archpat/checker.hpp"

namespace archpat::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kViolated = 1,
  kInvalidSpec = 2,
  kInconclusive = 3,
  kUsage = 4,
};

struct Environment {
  bool color = false;  // ANSI color in human output
};

/// Reads ARCHPAT_COLOR and whether stdout is a terminal.
Environment environment_from_process();

/// Runs one command line (without the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Environment& env = {});

/// Counterexample file: pattern text, property, formula and the lasso as
/// flat `variable -> value` maps. Schema in docs/report-schema.md.
std::string lasso_to_json(const PatternSpec& spec, const std::string& pattern_text, const std::string& property,
                          const LtlFormula& formula, const Lasso& lasso);

}  // namespace archpat::cli
