#pragma once

#include <stdexcept>
#include <string>

namespace conesta {

// Raised for malformed inputs: bad dimensions, out-of-range indices,
// nonpositive weights, unparsable files.
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when a computation cannot produce a meaningful result, e.g. an
// infeasible simulation calibration.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace conesta
