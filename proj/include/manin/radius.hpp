#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "manin/numeric.hpp"
#include "manin/series.hpp"
#include "manin/weights.hpp"

namespace manin {

/// Estimate of the radius R_w of the phase space (the disk of eigenvalues of T_thetabar).
struct RadiusEstimate {
  double value = 0.0;        // +inf when the phase space is the whole plane
  double uncertainty = 0.0;  // drift bound for finite values; 0 for the 0 / inf markers
  std::vector<double> samples;      // r_n = (|q|^{-(n+1)} w_n^{1/n})^{1/2}, n = 1..H
  std::vector<double> log_samples;  // log r_n; samples saturate to inf, these do not
  SeriesVerdict boundary_verdict = SeriesVerdict::inconclusive;
  bool extreme = false;  // value == 0: the phase space is the single point {0}

  bool is_infinite() const { return value == kInf; }
};

struct RadiusOptions {
  std::size_t horizon = 1000;
  double cap = 1e6;
  /// Terms examined when testing the series at |lambda| = R_w.
  std::size_t boundary_horizon = 10000;
};

namespace detail {

inline std::size_t usable_horizon(const WeightSequence& w, std::size_t wanted) {
  if (auto h = w.horizon()) return std::min(wanted, *h);
  return wanted;
}

/// log of |lambda|^{2n} |q|^{n(n+1)} / w_n, the n-th term of ||phi_lambda||^2.
inline double log_norm_term(double log_abs_lambda, const WeightSequence& w, const QParam& q, std::int64_t n) {
  const auto nd = static_cast<double>(n);
  const double lam = n == 0 ? 0.0 : 2.0 * nd * log_abs_lambda;
  return lam + nd * (nd + 1.0) * q.log_abs() - w.log_weight(n);
}

}  // namespace detail

/// liminf_n r_n, estimated on a finite horizon.
///
/// The last 50 samples decide the infinite and zero markers: non-decreasing
/// and either above `cap` or growing like a power of n (log-log slope >= 0.1)
/// reads as +inf; the mirror image reads as 0. Otherwise the value is the
/// running minimum over the last quarter of the samples, with uncertainty four
/// times that window's spread (the remaining drift if r_n approaches its limit
/// like 1/n).
inline RadiusEstimate radius_of_convergence(const WeightSequence& w, const QParam& q, RadiusOptions opt = {}) {
  const std::size_t h = detail::usable_horizon(w, opt.horizon);
  if (h < 20) throw ConfigError("radius estimation needs a horizon of at least 20 weights");
  RadiusEstimate out;
  for (std::size_t n = 1; n <= h; ++n) {
    const auto nd = static_cast<double>(n);
    const double l = 0.5 * (-(nd + 1.0) * q.log_abs() + w.log_weight(static_cast<std::int64_t>(n)) / nd);
    out.log_samples.push_back(l);
    out.samples.push_back(std::exp(l));
  }

  const std::size_t tail = std::min<std::size_t>(50, h - 1);
  bool non_decreasing = true, non_increasing = true;
  for (std::size_t k = h - tail; k < h; ++k) {
    const double tol = 1e-13 * std::max(1.0, std::abs(out.log_samples[k]));
    if (out.log_samples[k] < out.log_samples[k - 1] - tol) non_decreasing = false;
    if (out.log_samples[k] > out.log_samples[k - 1] + tol) non_increasing = false;
  }
  const std::size_t start = h - h / 4;
  std::vector<double> lx, ly;
  for (std::size_t k = start; k < h; ++k) {
    lx.push_back(std::log(static_cast<double>(k + 1)));
    ly.push_back(out.log_samples[k]);
  }
  const double slope = detail::ls_slope(lx, ly);
  const double last_log = out.log_samples.back();

  if (non_decreasing && (last_log > std::log(opt.cap) || slope >= 0.1)) {
    out.value = kInf;
    out.boundary_verdict = SeriesVerdict::inconclusive;  // no boundary
    return out;
  }
  if (non_increasing && (last_log < -std::log(opt.cap) || slope <= -0.1)) {
    out.value = 0.0;
    out.extreme = true;
    out.boundary_verdict = SeriesVerdict::converges;  // the series at lambda = 0 is one term
    return out;
  }

  const auto first = out.samples.begin() + static_cast<std::ptrdiff_t>(start);
  const double lo = *std::min_element(first, out.samples.end());
  const double hi = *std::max_element(first, out.samples.end());
  out.value = lo;
  out.uncertainty = std::max(4.0 * (hi - lo), 1e-12 * lo);
  out.extreme = out.value == 0.0;

  // Series (||phi_lambda||^2) at |lambda| = R_w.
  const std::size_t bh = detail::usable_horizon(w, opt.boundary_horizon);
  const double log_r = std::log(out.value);
  std::vector<double> terms;
  for (std::size_t n = 0; n <= bh; ++n)
    terms.push_back(detail::log_norm_term(log_r, w, q, static_cast<std::int64_t>(n)));
  out.boundary_verdict = classify_positive_series(terms, 0).verdict;
  return out;
}

}  // namespace manin
