#ifndef HEXCH_ERROR_HPP_
#define HEXCH_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace hexch {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vertices from different trees, malformed encodings, out-of-range coordinates.
class IndexDomainError : public Error {
 public:
  using Error::Error;
};

// A sigma model was handed a path block of the wrong length.
class ArityError : public Error {
 public:
  using Error::Error;
};

// A truncation exceeds the configured leaf cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hexch

#endif  // HEXCH_ERROR_HPP_
