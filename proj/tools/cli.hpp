#pragma once

#include <iosfwd>

namespace regdiag::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kDiagnosisError = 2 };

/// Entry point of the `regdiag` command. Reports and tables go to --out
/// files when given, otherwise to `out`; warnings and errors go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace regdiag::cli
