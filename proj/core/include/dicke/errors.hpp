#pragma once

#include <stdexcept>
#include <string>

namespace dicke {

// Base class for failures raised by the simulator. Argument/precondition
// violations use std::invalid_argument directly.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Iterative solver or time stepper failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Population reached the top of the truncated Fock space.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double tail_weight)
      : Error(what), tail_weight_(tail_weight) {}
  double tail_weight() const noexcept { return tail_weight_; }

 private:
  double tail_weight_;
};

// Density matrix lost positivity beyond integration tolerance.
class PositivityError : public Error {
 public:
  using Error::Error;
};

class SnapshotError : public Error {
 public:
  using Error::Error;
};

}  // namespace dicke
