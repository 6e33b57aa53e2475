#pragma once

#include <stdexcept>
#include <string>

namespace dhspec {

/// Operands live in different ambient dimensions.
struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Parameters outside the domain of an operation (m < 1, z <= 0 at m = 1, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Eigen-index not admissible for the dimension.
struct InvalidIndex : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Explicit construction not implemented for this dimension.
struct Unsupported : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An integral whose tail does not decay inside the integration domain.
struct DivergentIntegral : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Nonlinear or linear solver failure inside the PDE harness.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dhspec
