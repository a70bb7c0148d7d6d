#pragma once

#include <stdexcept>
#include <string>

namespace dsmeta {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative method failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Root bracket has no sign change, even after expansion.
class NoSignChange : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

}  // namespace dsmeta
