#pragma once

#include <stdexcept>
#include <string>

namespace qprobe {

// Bad arguments: out-of-range parameters, wrong probe mode, malformed input.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Iteration caps exhausted, quadrature that will not settle, no peaks found.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The input is well formed but violates a physical precondition of the
// protocol (degenerate ground space, non-thermal populations).
class ContractViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qprobe
