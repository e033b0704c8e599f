#pragma once

#include <stdexcept>
#include <string>

namespace visbound {

// Argument outside the mathematical domain of an operation (d < 2, Lambda <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed input data: non-finite costs, invalid scenes, empty sweeps.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Transportation instance whose marginals do not balance.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure inside a solver (iteration cap, drift beyond tolerance).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A billiard trajectory exceeded the bounce cap.
class TrappedRay : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A billiard trajectory hit a polygon vertex, where the reflection is undefined.
class SingularHit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace visbound
