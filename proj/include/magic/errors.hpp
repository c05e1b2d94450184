#pragma once

#include <stdexcept>
#include <string>

namespace magic {

// Bad input: out-of-range parameters, malformed configs, wrong dimensions.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation ran but did not meet its numerical contract
// (non-convergence, tolerance violations, missing sign change).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace magic
