#pragma once

#include <iosfwd>

namespace dfo::cli {

enum ExitCode { kOk = 0, kProblemFailure = 1, kUsage = 2 };

/// Entry point of dfokit: classify, solve, export, verify, bench, gen-fixture.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace dfo::cli
