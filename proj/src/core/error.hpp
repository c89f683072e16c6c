#pragma once

#include <stdexcept>
#include <string>

namespace xmaps {

// Error categories surfaced through the C API as status codes.
enum class ErrorKind {
  invalid_argument,
  degenerate,
  dimension_mismatch,
  out_of_bounds,
  empty_input,
  io,
  bad_magic,
  truncated,
  unsorted,
  bad_format,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace xmaps
