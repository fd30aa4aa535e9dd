#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace symsparse {

enum class ErrorKind {
  precondition,
  size_mismatch,
  overflow,
  cap_exceeded,
  out_of_range,
  malformed,
  parse,
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::size_mismatch: return "size_mismatch";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::cap_exceeded: return "cap_exceeded";
    case ErrorKind::out_of_range: return "out_of_range";
    case ErrorKind::malformed: return "malformed";
    case ErrorKind::parse: return "parse";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

}  // namespace symsparse
