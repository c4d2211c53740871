#pragma once

#include <stdexcept>
#include <string>

namespace kgf {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands whose algebra shape or module ranks do not conform.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Block index outside the algebra.
class IndexError : public Error {
 public:
  using Error::Error;
};

class NotInvertibleError : public Error {
 public:
  using Error::Error;
};

/// Index structure cannot carry a coordinate g-orthonormal basis.
class BasisIncompatibleError : public Error {
 public:
  using Error::Error;
};

class PartitionError : public Error {
 public:
  using Error::Error;
};

/// An operation's stated precondition (isometry, co-isometry, commutation,
/// duality of an input pair) does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Malformed instance document. `path()` is a JSON-pointer-like location.
class ParseError : public Error {
 public:
  ParseError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace kgf
