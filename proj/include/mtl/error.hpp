#pragma once

#include <stdexcept>
#include <string>

namespace mtl {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated operation precondition (bad grid, uncertified input, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver failed to meet its stopping rule.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double last_factor, double last_gap, int iterations)
      : Error(what), last_factor(last_factor), last_gap(last_gap), iterations(iterations) {}

  double last_factor;
  double last_gap;
  int iterations;
};

/// Malformed or inconsistent configuration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mtl
