#pragma once

#include <stdexcept>
#include <string>

namespace glpin {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: CLI maps to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Iterative method gave up. CLI maps to exit code 2.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual = 0.0, int iterations = 0)
      : Error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

class NonDegeneracyError : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace glpin
