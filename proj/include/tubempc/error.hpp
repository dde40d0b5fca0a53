#pragma once

#include <stdexcept>
#include <string>

namespace tubempc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A set operation was asked for something outside the supported dimensions
/// (vertex enumeration above the caps, moments of high-dimensional sets).
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A polytope would be empty or unbounded.
class EmptySetError : public Error {
 public:
  using Error::Error;
};

/// A standing assumption on the problem data does not hold (non-contractive
/// error dynamics, ROSS on the boundary, tightened set without interior, ...).
class AssumptionError : public Error {
 public:
  using Error::Error;
};

/// An optimisation problem has no feasible point.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// A disturbance sample lies outside W or a disturbance file is malformed.
class DisturbanceError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or input file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tubempc
