#pragma once

#include <stdexcept>
#include <string>

namespace syzlab {

/// Base of every library error. The CLI maps the concrete kind to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// Rejected input: bad dimensions, non-positive parameters, degenerate data.
class ValidationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "validation"; }
};

/// Mixing exact and double-precision forms.
class PrecisionMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
  const char* kind() const noexcept override { return "precision_mismatch"; }
};

/// Iterative solve did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual, int iterations)
      : Error(what), last_residual_(last_residual), iterations_(iterations) {}
  const char* kind() const noexcept override { return "convergence"; }
  double last_residual() const noexcept { return last_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  int iterations_;
};

/// A table that should be integral is not.
class IntegralityError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "integrality"; }
};

}  // namespace syzlab
