#ifndef STRAINMAP_ERRORS_HPP
#define STRAINMAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace strainmap {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// k-plane trigonometry
struct NoTriangle : Error {
  using Error::Error;
};
struct DegenerateVertex : Error {
  using Error::Error;
};

// charts
struct EmptyDomain : Error {
  using Error::Error;
};
struct OutOfDomain : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct ZeroVector : Error {
  using Error::Error;
};

// spaces and file I/O
struct ValidationError : Error {
  using Error::Error;
};
struct ParseError : Error {
  ParseError(const std::string& what, long line_no)
      : Error(what + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
  long line;
};
struct IncompatibleModels : Error {
  using Error::Error;
};

// gluing
struct StrainerNotFound : Error {
  using Error::Error;
};
struct TransportQualityFail : Error {
  using Error::Error;
};

}  // namespace strainmap

#endif
