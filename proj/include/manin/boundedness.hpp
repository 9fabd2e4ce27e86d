#pragma once

// Boundedness, compactness and domain tests for the annihilation operator,
// all driven by the sequence |q|^{-2n} w_n / w_{n-1}.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "manin/numeric.hpp"
#include "manin/series.hpp"
#include "manin/weights.hpp"

namespace manin {

enum class Tristate { yes, no, inconclusive };

inline std::string to_string(Tristate t) {
  switch (t) {
    case Tristate::yes: return "yes";
    case Tristate::no: return "no";
    case Tristate::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct BoundednessReport {
  std::vector<double> ratio_sequence;  // n = 1..H
  Tristate bounded = Tristate::inconclusive;
  Tristate compact = Tristate::inconclusive;
  double sup_estimate = kInf;
  double loglog_slope = 0.0;  // trend of log ratio against log n on the window
};

inline constexpr double kBoundednessCap = 1e9;

/// Classifies T_thetabar from the first H ratios |q|^{-2n} w_n / w_{n-1}.
///
/// The trend window is the last quarter of the samples. Unbounded: any sample
/// above the cap, or a non-decreasing window with log-log slope >= 0.1.
/// Compact: a non-increasing window that either falls below 1/cap or has
/// log-log slope <= -0.1. Bounded but not compact: a flat window (|slope| < 0.01)
/// between 1/cap and cap. Anything else is inconclusive.
inline BoundednessReport boundedness_report(const WeightSequence& w, const QParam& q, std::size_t horizon = 200) {
  if (horizon < 10) throw ConfigError("boundedness horizon must be at least 10");
  BoundednessReport out;
  std::vector<double> logs;
  for (std::size_t n = 1; n <= horizon; ++n) {
    const auto nn = static_cast<std::int64_t>(n);
    const double l = -2.0 * static_cast<double>(n) * q.log_abs() + w.log_weight(nn) - w.log_weight(nn - 1);
    logs.push_back(l);
    out.ratio_sequence.push_back(std::exp(l));
  }
  const std::size_t start = horizon - horizon / 4;
  std::vector<double> lx, ly;
  bool non_decreasing = true, non_increasing = true;
  for (std::size_t k = start; k < horizon; ++k) {
    lx.push_back(std::log(static_cast<double>(k + 1)));
    ly.push_back(logs[k]);
    if (k > start) {
      const double tol = 1e-12 * std::max(1.0, std::abs(logs[k]));
      if (logs[k] < logs[k - 1] - tol) non_decreasing = false;
      if (logs[k] > logs[k - 1] + tol) non_increasing = false;
    }
  }
  out.loglog_slope = detail::ls_slope(lx, ly);
  const double max_all = *std::max_element(out.ratio_sequence.begin(), out.ratio_sequence.end());
  const double last = out.ratio_sequence.back();
  const double window_max = *std::max_element(out.ratio_sequence.begin() + static_cast<std::ptrdiff_t>(start),
                                              out.ratio_sequence.end());
  const double window_min = *std::min_element(out.ratio_sequence.begin() + static_cast<std::ptrdiff_t>(start),
                                              out.ratio_sequence.end());

  if (max_all > kBoundednessCap || (non_decreasing && out.loglog_slope >= 0.1)) {
    out.bounded = Tristate::no;
    out.compact = Tristate::no;
  } else if (non_increasing && (last < 1.0 / kBoundednessCap || out.loglog_slope <= -0.1)) {
    out.bounded = Tristate::yes;
    out.compact = Tristate::yes;
    out.sup_estimate = max_all;
  } else if (std::abs(out.loglog_slope) < 0.01 && window_max < kBoundednessCap &&
             window_min > 1.0 / kBoundednessCap) {
    out.bounded = Tristate::yes;
    out.compact = Tristate::no;
    out.sup_estimate = max_all;
  }
  return out;
}

enum class DomainVerdict { in_domain, not_in_domain, inconclusive };

inline std::string to_string(DomainVerdict v) {
  switch (v) {
    case DomainVerdict::in_domain: return "in_domain";
    case DomainVerdict::not_in_domain: return "not_in_domain";
    case DomainVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

/// An infinite coefficient sequence a_n, described by log |a_n|.
struct CoefficientFamily {
  std::string name;
  std::function<double(std::size_t)> log_abs;
};

using CoefficientSource = std::variant<std::vector<cplx>, CoefficientFamily>;

struct DomainReport {
  DomainVerdict verdict = DomainVerdict::inconclusive;
  SeriesTest test;
};

/// Is sum a_n phi_n in D(T_thetabar), i.e. sum |a_n|^2 |q|^{-2n} w_n / w_{n-1} < infinity?
/// Finite vectors always are; families are judged on n = 1..H.
inline DomainReport domain_membership(const CoefficientSource& source, const WeightSequence& w, const QParam& q,
                                      std::size_t horizon = 1000) {
  DomainReport out;
  if (std::holds_alternative<std::vector<cplx>>(source)) {
    out.verdict = DomainVerdict::in_domain;
    out.test.verdict = SeriesVerdict::converges;
    return out;
  }
  const auto& family = std::get<CoefficientFamily>(source);
  std::vector<double> logs;
  for (std::size_t n = 1; n <= horizon; ++n) {
    const auto nn = static_cast<std::int64_t>(n);
    logs.push_back(2.0 * family.log_abs(n) - 2.0 * static_cast<double>(n) * q.log_abs() + w.log_weight(nn) -
                   w.log_weight(nn - 1));
  }
  out.test = classify_positive_series(logs, 1);
  switch (out.test.verdict) {
    case SeriesVerdict::converges: out.verdict = DomainVerdict::in_domain; break;
    case SeriesVerdict::diverges: out.verdict = DomainVerdict::not_in_domain; break;
    case SeriesVerdict::inconclusive: out.verdict = DomainVerdict::inconclusive; break;
  }
  return out;
}

}  // namespace manin
