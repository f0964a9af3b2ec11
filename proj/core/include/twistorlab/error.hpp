#pragma once

#include <stdexcept>
#include <string>

namespace twistorlab {

/// Base error type for every contract violation raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A surface failed one of its pointwise invariants (metric, J², compatibility).
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace twistorlab
