#pragma once

#include <stdexcept>
#include <string>

namespace plenocal {

/// Failure categories, mapped to process exit codes by the command line tool.
enum class ErrorCode {
  Validation,      ///< bad input data or configuration
  NonConvergence,  ///< an iterative solver failed to reach its tolerance
  Io,              ///< file system or decoding failure
  Degenerate       ///< geometric degeneracy (projection at infinity, ...)
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Validation: return "validation";
    case ErrorCode::NonConvergence: return "non-convergence";
    case ErrorCode::Io: return "io";
    case ErrorCode::Degenerate: return "degenerate";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool ok, ErrorCode code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

}  // namespace plenocal
