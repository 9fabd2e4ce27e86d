#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "manin/errors.hpp"
#include "manin/numeric.hpp"

namespace manin {

namespace detail {

// n! for n <= 170, the last factorial below DBL_MAX.
inline constexpr std::array<double, 171> make_factorials() {
  std::array<double, 171> f{};
  f[0] = 1.0;
  for (std::size_t n = 1; n < f.size(); ++n) f[n] = f[n - 1] * static_cast<double>(n);
  return f;
}
inline constexpr std::array<double, 171> kExactFactorials = make_factorials();

}  // namespace detail

/// The deformation parameter q of the relation theta thetabar = q thetabar theta.
class QParam {
 public:
  QParam(cplx value) : value_(value) {  // NOLINT: implicit from a plain number is intended
    if (value == cplx{0.0, 0.0}) throw ConfigError("q must be non-zero");
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
      throw ConfigError("q must be finite");
    log_abs_ = std::log(std::abs(value));
    arg_ = std::arg(value);
  }
  QParam(double re) : QParam(cplx{re, 0.0}) {}  // NOLINT

  cplx value() const { return value_; }
  double abs() const { return std::abs(value_); }
  double log_abs() const { return log_abs_; }
  double arg() const { return arg_; }
  QParam conj() const { return QParam(std::conj(value_)); }

  /// q^k. Small exponents use repeated squaring so that e.g. i^3 = -i exactly.
  cplx pow(std::int64_t k) const {
    if (k == 0) return {1.0, 0.0};
    if (k >= -64 && k <= 64) {
      cplx base = k > 0 ? value_ : cplx{1.0, 0.0} / value_;
      std::uint64_t e = static_cast<std::uint64_t>(k > 0 ? k : -k);
      cplx acc{1.0, 0.0};
      while (e != 0) {
        if (e & 1U) acc *= base;
        base *= base;
        e >>= 1U;
      }
      return acc;
    }
    return pow_log(k).value();
  }

  /// q^k in log-polar form; never overflows.
  LogPolar pow_log(std::int64_t k) const {
    const auto kd = static_cast<double>(k);
    return {kd * log_abs_, wrap_phase(kd * arg_)};
  }

  friend bool operator==(const QParam& a, const QParam& b) { return a.value_ == b.value_; }

 private:
  cplx value_;
  double log_abs_ = 0.0;
  double arg_ = 0.0;
};

enum class WeightKind { factorial, constant, explicit_table, power_factorial };

inline std::string to_string(WeightKind k) {
  switch (k) {
    case WeightKind::factorial: return "factorial";
    case WeightKind::constant: return "constant";
    case WeightKind::explicit_table: return "explicit";
    case WeightKind::power_factorial: return "power-factorial";
  }
  return "unknown";
}

/// The positive weights w_n defining the inner product <theta^i, theta^k> = w_i delta_ik.
///
/// Every rule carries an overall positive scale c, so w_n = c * base_n. Indices
/// below zero return 1. Explicit tables have a finite horizon; asking past it
/// throws ConfigError.
class WeightSequence {
 public:
  static WeightSequence factorial(double scale = 1.0) {
    return WeightSequence(WeightKind::factorial, scale, 1.0, {});
  }
  static WeightSequence constant(double value = 1.0) {
    return WeightSequence(WeightKind::constant, value, 0.0, {});
  }
  /// w_n = scale * (n!)^s.
  static WeightSequence power_factorial(double s, double scale = 1.0) {
    return WeightSequence(WeightKind::power_factorial, scale, s, {});
  }
  static WeightSequence explicit_table(std::vector<double> table) {
    if (table.empty()) throw ConfigError("explicit weight table is empty");
    return WeightSequence(WeightKind::explicit_table, 1.0, 0.0, std::move(table));
  }

  WeightSequence scaled(double c) const {
    WeightSequence out = *this;
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("weight scale must be positive");
    out.scale_ *= c;
    out.log_scale_ = std::log(out.scale_);
    return out;
  }

  WeightKind kind() const { return kind_; }
  double scale() const { return scale_; }
  /// Exponent s of the power-factorial rule (1 for factorial, 0 for constant).
  double exponent() const { return exponent_; }
  const std::vector<double>& table() const { return table_; }

  /// Largest index that can be materialized, if finite.
  std::optional<std::size_t> horizon() const {
    if (kind_ == WeightKind::explicit_table) return table_.size() - 1;
    return std::nullopt;
  }

  double operator()(std::int64_t n) const {
    if (n < 0) return 1.0;
    switch (kind_) {
      case WeightKind::constant: return scale_;
      case WeightKind::explicit_table: return scale_ * table_.at(check_index(n));
      case WeightKind::factorial:
        if (n < static_cast<std::int64_t>(kExactFactorials.size())) return scale_ * kExactFactorials[n];
        break;
      case WeightKind::power_factorial: break;
    }
    return std::exp(log_weight(n));
  }

  double log_weight(std::int64_t n) const {
    if (n < 0) return 0.0;
    switch (kind_) {
      case WeightKind::constant: return log_scale_;
      case WeightKind::explicit_table: return log_scale_ + std::log(table_.at(check_index(n)));
      case WeightKind::factorial: return log_scale_ + log_factorial(n);
      case WeightKind::power_factorial: return log_scale_ + exponent_ * log_factorial(n);
    }
    return 0.0;
  }

  /// w_a / w_b, exact division when both are representable.
  double ratio(std::int64_t a, std::int64_t b) const {
    const double wa = (*this)(a), wb = (*this)(b);
    if (std::isnormal(wa) && std::isnormal(wb)) return wa / wb;
    return std::exp(log_weight(a) - log_weight(b));
  }

  std::string describe() const {
    std::string s = to_string(kind_);
    if (kind_ == WeightKind::power_factorial) s += "(s=" + std::to_string(exponent_) + ")";
    if (scale_ != 1.0) s += "*" + std::to_string(scale_);
    return s;
  }

  friend bool operator==(const WeightSequence& a, const WeightSequence& b) {
    return a.kind_ == b.kind_ && a.scale_ == b.scale_ && a.exponent_ == b.exponent_ &&
           a.table_ == b.table_;
  }

 private:
  WeightSequence(WeightKind kind, double scale, double exponent, std::vector<double> table)
      : kind_(kind), scale_(scale), exponent_(exponent), table_(std::move(table)) {
    if (!(scale_ > 0.0) || !std::isfinite(scale_)) throw ConfigError("weights must be positive");
    if (!std::isfinite(exponent_)) throw ConfigError("power-factorial exponent must be finite");
    for (double w : table_)
      if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("explicit weights must be positive and finite");
    log_scale_ = std::log(scale_);
  }

  std::size_t check_index(std::int64_t n) const {
    const auto idx = static_cast<std::size_t>(n);
    if (idx >= table_.size())
      throw ConfigError("weight index " + std::to_string(n) + " is beyond the explicit table horizon " +
                        std::to_string(table_.size() - 1));
    return idx;
  }

  static double log_factorial(std::int64_t n) {
    if (n < static_cast<std::int64_t>(kExactFactorials.size())) return std::log(kExactFactorials[n]);
    return std::lgamma(static_cast<double>(n) + 1.0);
  }

  static constexpr const auto& kExactFactorials = detail::kExactFactorials;

  WeightKind kind_;
  double scale_;
  double exponent_;
  std::vector<double> table_;
  double log_scale_ = 0.0;
};

}  // namespace manin
