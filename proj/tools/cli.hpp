#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nlb::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInfeasible = 1,  // also a failed verify
  kInputError = 2,
  kInternalError = 3,
};

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

/// Runs one command line (without the program name). Errors are reported on
/// streams.err as {"error": {"kind": ..., "message": ...}}.
int run(const std::vector<std::string>& args, Streams streams);

}  // namespace nlb::cli
