#pragma once

#include <iosfwd>

namespace fcc::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kIo = 3,
  kInternal = 4,
};

/// `fcc analyze|simulate|sweep|profiles [flags]`. Reports go to `out`,
/// diagnostics to `err`; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fcc::cli
