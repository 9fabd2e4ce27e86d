#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>

#include "manin/errors.hpp"

namespace manin {

using cplx = std::complex<double>;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Reduce an angle to (-pi, pi].
inline double wrap_phase(double phase) {
  return std::remainder(phase, 2.0 * std::numbers::pi);
}

/// A complex number stored as (log|z|, arg z). Zero is log_abs = -inf.
struct LogPolar {
  double log_abs = kNegInf;
  double phase = 0.0;

  bool is_zero() const { return log_abs == kNegInf; }

  cplx value() const { return scaled(0.0); }

  /// z * exp(-shift), for summing many terms of wildly different size.
  cplx scaled(double shift) const {
    if (is_zero()) return {0.0, 0.0};
    return std::polar(std::exp(log_abs - shift), phase);
  }

  LogPolar conj() const { return {log_abs, -phase}; }

  friend LogPolar operator*(const LogPolar& a, const LogPolar& b) {
    if (a.is_zero() || b.is_zero()) return {};
    return {a.log_abs + b.log_abs, wrap_phase(a.phase + b.phase)};
  }

  static LogPolar from(cplx z) {
    if (z == cplx{0.0, 0.0}) return {};
    return {std::log(std::abs(z)), std::arg(z)};
  }
};

/// log(exp(a) + exp(b)) without overflow.
inline double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

namespace detail {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw InputTooLarge("exponent addition overflows 64 bits");
  return out;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw InputTooLarge("exponent product overflows 64 bits");
  return out;
}

/// n(n+1)/2 with overflow checking.
inline std::int64_t triangular(std::int64_t n) {
  return n % 2 == 0 ? checked_mul(n / 2, n + 1) : checked_mul(n, (n + 1) / 2);
}

/// Least-squares slope of y against x.
inline double ls_slope(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx == 0 ? 0.0 : sxy / sxx;
}

inline void require_finite(cplx z, const std::string& what) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw NumericalError(what + " is not finite in double precision");
}

}  // namespace detail
}  // namespace manin
