#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geomatch {

enum class ErrorKind {
  dimension,
  parameter,
  contract,
  capacity,
  unsupported_dimension,
  io,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries one of the kinds above so the
// C API can map it onto a status code without string matching.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool ok, ErrorKind kind, const char* what) {
  if (!ok) fail(kind, what);
}

}  // namespace geomatch
