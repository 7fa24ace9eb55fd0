#pragma once

#include <stdexcept>
#include <string>

namespace lipfrac {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed a value outside the documented domain.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Carries the 1-based line number of the offending line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Input parsed fine but violates a structural invariant (degenerate element, bad facet, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or incomplete simulation configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver did not reach its tolerance.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Non-finite state detected during time stepping.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long step)
      : Error("step " + std::to_string(step) + ": " + what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

}  // namespace lipfrac
