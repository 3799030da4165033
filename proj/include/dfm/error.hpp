#pragma once

#include <stdexcept>
#include <string>

namespace dfm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside the documented domain (p = 0, mismatched ground sets, ...).
class ParameterError : public Error {
public:
  using Error::Error;
};

/// A structural precondition does not hold, e.g. a crossing partition passed to
/// the Kreweras complement.
class PreconditionError : public ParameterError {
public:
  using ParameterError::ParameterError;
};

/// A numerical object fails its defining invariants (non-Hadamard fiber, ...).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// The requested computation exceeds the operation budget. Carries the
/// pre-computed cost estimate so callers can report it.
class BudgetError : public Error {
public:
  BudgetError(const std::string& what, long double estimated_ops, long double budget)
      : Error(what), estimated_ops_(estimated_ops), budget_(budget) {}

  long double estimated_ops() const noexcept { return estimated_ops_; }
  long double budget() const noexcept { return budget_; }

private:
  long double estimated_ops_;
  long double budget_;
};

}  // namespace dfm
