#pragma once

#include <iosfwd>

namespace tpshift::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kNumerical = 3, kRelation = 4 };

// Full command-line entry point; reports go to out unless --out is given,
// diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tpshift::cli
