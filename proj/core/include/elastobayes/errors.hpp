#pragma once

#include <stdexcept>
#include <string>

namespace elastobayes {

// Caller passed a value outside the documented domain.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Base for numerical failures raised by the solvers and samplers.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateElement : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Stiffness matrix singular: Dirichlet data does not remove rigid modes.
class IllPosedProblem : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class FactorizationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Gamma rate or Gaussian precision collapsed to zero.
class DegeneratePosterior : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateConditional : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// B^T Lambda B is not invertible.
class ConstraintDegeneracy : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Zero strain in an element leaves the modulus conditional undefined.
class SingularConditional : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace elastobayes
