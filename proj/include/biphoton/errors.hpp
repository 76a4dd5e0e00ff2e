#pragma once

#include <stdexcept>
#include <string>

namespace biphoton {

/// Input outside the mathematical or physical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Detuning grid unusable for the requested operation (too narrow, wrong size, mismatched).
class GridError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Iterative procedure (fit, quadrature) failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace biphoton
