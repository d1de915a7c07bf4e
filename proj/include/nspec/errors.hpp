#pragma once

#include <stdexcept>
#include <string>

namespace nspec {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// The characteristic cubic has a (numerically) triple root; the
/// trigonometric angle is undefined.
class DegenerateSpectrum : public Error {
 public:
  using Error::Error;
};

/// An iterative solver hit its iteration cap.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

class EmptyGrid : public Error {
 public:
  using Error::Error;
};

class NoAnticrossing : public Error {
 public:
  using Error::Error;
};

class InvalidQuantumNumbers : public Error {
 public:
  using Error::Error;
};

class NotAnNConfiguration : public Error {
 public:
  using Error::Error;
};

class SingularJacobian : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

/// CSV parse failure; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(long line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

class EmptySeries : public Error {
 public:
  using Error::Error;
};

class InvalidBranching : public Error {
 public:
  using Error::Error;
};

/// The Liouvillian kernel is not one-dimensional (multiple steady states).
class DegenerateKernel : public Error {
 public:
  using Error::Error;
};

}  // namespace nspec
