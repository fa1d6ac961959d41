#pragma once

#include <stdexcept>
#include <string>

namespace adr {

/// Failure category. The CLI maps each category to its exit code.
enum class ErrorKind {
  kInput = 2,          // malformed or unreadable input
  kNumeric = 3,        // solver produced no certificate
  kScaleExceeded = 4,  // instance too large for an exact routine
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace adr
