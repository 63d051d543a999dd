#pragma once

#include <stdexcept>
#include <string>

namespace rentharmony {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An object would violate its invariants (bad lattice point, invalid cell, ...).
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive routines refuse grids above their configured size guard.
class GridTooLarge : public Error {
 public:
  using Error::Error;
};

/// The operation is not defined for these arguments (e.g. combine_pair with n != 3).
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// A preference oracle broke one of the rental-harmony conditions.
class ConditionViolation : public Error {
 public:
  using Error::Error;
};

/// The input does not meet a precondition of a multi-labeling search.
class HypothesisFailure : public Error {
 public:
  using Error::Error;
};

/// Something that mathematically cannot happen did; indicates a bug or an
/// invalid labeling slipping through.
class InternalInconsistency : public Error {
 public:
  using Error::Error;
};

/// The path-following walk met a non-generic configuration and must be
/// retried with a different perturbation.
class DegeneracySignal : public Error {
 public:
  using Error::Error;
};

/// The walk exceeded its step budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace rentharmony
