#pragma once

#include <stdexcept>
#include <string>

namespace qes {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied something outside an operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An iterative method did not reach its tolerance, or a numerical
/// refinement could not be resolved.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Exact arithmetic produced an inconsistent result (e.g. a non-integral
/// coefficient where integrality was guaranteed).
class IntegrityFailure : public Error {
 public:
  using Error::Error;
};

/// A numerically observed structure contradicts one of the conjectured
/// patterns (row counts, transposition table, support geometry).
class ConjectureViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace qes
