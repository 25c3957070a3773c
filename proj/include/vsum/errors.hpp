#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vsum {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments, malformed specs, unknown presets.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Requested operation exceeds what a routine supports (e.g. dense oracle size).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// Point outside the effective domain of a graph or function.
class DomainError : public Error {
 public:
  using Error::Error;
};

class IterationLimitError : public Error {
 public:
  IterationLimitError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Nonlinear solve gave up; carries the best iterate seen.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double residual, std::vector<double> best)
      : Error(what), residual_(residual), best_(std::move(best)) {}
  double residual() const { return residual_; }
  const std::vector<double>& best_iterate() const { return best_; }

 private:
  double residual_;
  std::vector<double> best_;
};

// A Jacobian or matrix that should be positive definite was not.
class MonotonicityError : public Error {
 public:
  using Error::Error;
};

}  // namespace vsum
