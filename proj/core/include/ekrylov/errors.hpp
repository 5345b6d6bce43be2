#pragma once

#include <stdexcept>
#include <string>

namespace ekrylov {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument or violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The operation is not defined for this distribution family or chain.
class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

/// A requested coefficient needs a moment that does not exist.
class DivergentMoment : public Error {
 public:
  DivergentMoment(const std::string& what, int largest_valid)
      : Error(what), largest_valid_(largest_valid) {}
  /// Largest coefficient index that is still backed by finite moments.
  int largest_valid() const noexcept { return largest_valid_; }

 private:
  int largest_valid_;
};

/// Hankel determinants lost too much precision to be trusted.
class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, int valid_order)
      : Error(what), valid_order_(valid_order) {}
  int valid_order() const noexcept { return valid_order_; }

 private:
  int valid_order_;
};

/// A discrete measure ran out of support points before the requested length.
class ChainExhausted : public Error {
 public:
  using Error::Error;
};

/// Eigen-solver failure or another numerical breakdown.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace ekrylov
