#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace phmor {

/// Compact "%.3g" rendering for messages and reports.
inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A linear system is singular to working precision.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, double rcond)
      : Error(what + " (reciprocal condition estimate " + num(rcond) + ")"),
        rcond_(rcond) {}

  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

/// An iterative factorization did not converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A matrix expected to be positive definite is not.
class NotPositiveDefiniteError : public Error {
 public:
  using Error::Error;
};

/// A structural requirement (partition form, block pattern, invariant) fails.
/// The message names the failed condition.
class StructureError : public Error {
 public:
  StructureError(std::string condition, const std::string& detail)
      : Error(condition + ": " + detail), condition_(std::move(condition)) {}

  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

/// The reduced and full polynomial parts differ, so the requested norm is infinite.
class PolynomialMismatchError : public Error {
 public:
  using Error::Error;
};

/// An argument is outside the accepted domain (empty data, bad option value).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A projection basis collapsed to rank zero, or lost the columns a reducer needs.
class DegenerateBasisError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or parsed. Carries file and line context.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, long line, const std::string& detail)
      : Error(file + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + detail),
        file_(file),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  long line() const noexcept { return line_; }

 private:
  std::string file_;
  long line_;
};

}  // namespace phmor
