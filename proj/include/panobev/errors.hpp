#pragma once

#include <stdexcept>
#include <string>

namespace panobev {

enum class ErrorCode {
  invalid_argument,  // bad shapes, degenerate inputs, unsupported modes
  format,            // malformed or unsupported file content
  io,                // filesystem failures
  calibration,       // extrinsic invariant violations
  threshold,         // an acceptance/agreement threshold was not met
};

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

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

}  // namespace panobev
