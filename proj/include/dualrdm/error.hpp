#pragma once

#include <stdexcept>
#include <string>

namespace dualrdm {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (FCIDUMP, config). Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Well-formed input whose content is inconsistent (e.g. broken integral symmetry).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid orbital or pair index.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf or a violated numerical postcondition.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver stopped before meeting its tolerance.
class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace dualrdm
