#pragma once

#include <stdexcept>
#include <string>

namespace hidtrig {

enum class ErrorKind {
  InvalidInput,
  Unsupported,
  Unreachable,
  Parse,
  GuardExceeded,
  Precision,
  Io,
  Format,
};

const char* to_string(ErrorKind kind) noexcept;

// Single exception type for the library; the kind drives C status codes and
// CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace hidtrig
