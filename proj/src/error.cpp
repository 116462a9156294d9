#include "geomatch/error.hpp"

namespace geomatch {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::dimension: return "dimension error";
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::contract: return "contract error";
    case ErrorKind::capacity: return "capacity error";
    case ErrorKind::unsupported_dimension: return "unsupported dimension";
    case ErrorKind::io: return "i/o error";
  }
  return "unknown error";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace geomatch
