#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace manin {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad parameters: invalid weights, q = 0, weight index past a table horizon.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Exponent arithmetic would overflow 64-bit integers.
class InputTooLarge : public Error {
 public:
  using Error::Error;
};

/// The coherent state series diverges at the requested eigenvalue.
class OutsidePhaseSpace : public Error {
 public:
  using Error::Error;
};

/// A series converges too slowly to certify the tail within the term budget.
class ToleranceUnreachable : public Error {
 public:
  using Error::Error;
};

/// A result left the range of double precision (NaN or Inf).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The Hankel matrix of the moments is indefinite: no positive measure exists.
class NoPositiveMeasure : public Error {
 public:
  using Error::Error;
};

/// Moment solver lost positivity or accuracy; carries the largest order that worked.
class OrderTooHigh : public Error {
 public:
  OrderTooHigh(const std::string& what, std::size_t largest_order)
      : Error(what), largest_order_(largest_order) {}

  std::size_t largest_order() const noexcept { return largest_order_; }

 private:
  std::size_t largest_order_;
};

/// The radial rule or angular grid cannot integrate the requested polynomial exactly.
class InsufficientQuadrature : public Error {
 public:
  using Error::Error;
};

}  // namespace manin
