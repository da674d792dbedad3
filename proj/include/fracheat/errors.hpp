#pragma once

#include <stdexcept>
#include <string>

namespace fracheat {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class DomainError : public Error {
public:
  using Error::Error;
};

/// An operation received a field in the wrong representation.
class RepresentationError : public Error {
public:
  using Error::Error;
};

/// The grid cannot resolve the kernel symbol down to the guard level.
class UnderResolvedKernel : public Error {
public:
  using Error::Error;
};

/// Quadrature did not reach the requested tolerance.
class QuadratureError : public Error {
public:
  using Error::Error;
};

/// Non-finite values appeared while time stepping.
class BlowUpError : public Error {
public:
  BlowUpError(const std::string& what, double time)
      : Error(what + " (t = " + std::to_string(time) + ")"), time_(time) {}
  double time() const noexcept { return time_; }

private:
  double time_;
};

/// Picard iteration failed to contract on a segment.
class NonContractionError : public Error {
public:
  NonContractionError(const std::string& what, int iterations)
      : Error(what), iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

private:
  int iterations_;
};

/// A monitored invariant was violated during a solve.
class InvariantViolation : public Error {
public:
  using Error::Error;
};

/// A run configuration could not be parsed or failed validation. `line` is
/// 1-based, 0 when the problem is not tied to a location.
class ConfigError : public Error {
public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_;
};

}  // namespace fracheat
