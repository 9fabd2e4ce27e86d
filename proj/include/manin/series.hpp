#pragma once

// Finite-horizon convergence tests for series with positive terms, given as logs.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "manin/numeric.hpp"

namespace manin {

enum class SeriesVerdict { converges, diverges, inconclusive };

inline std::string to_string(SeriesVerdict v) {
  switch (v) {
    case SeriesVerdict::converges: return "converges";
    case SeriesVerdict::diverges: return "diverges";
    case SeriesVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct SeriesTest {
  SeriesVerdict verdict = SeriesVerdict::inconclusive;
  double raabe = 0.0;     // mean of n (d_n / d_{n+1} - 1) over the tail window
  double bertrand = 0.0;  // mean of ln n (raabe_n - 1) over the tail window
  double log_partial_sum = kNegInf;
};

/// Classifies sum_n d_n from log_terms[k] = log d_{first_index + k}.
///
/// Raabe's test decides when the Raabe number sits clearly away from 1
/// (above 1.1 or below 0.9, which also covers the plain ratio test). Near 1
/// Bertrand's refinement decides, but a divergence verdict additionally needs
/// the Raabe number not to exceed 1: a slowly growing Bertrand number
/// (e.g. n^{-1.01}) is reported as inconclusive rather than guessed.
inline SeriesTest classify_positive_series(std::span<const double> log_terms, std::size_t first_index = 1) {
  SeriesTest out;
  for (double l : log_terms) out.log_partial_sum = log_add_exp(out.log_partial_sum, l);
  if (log_terms.size() < 8) return out;
  for (double l : log_terms)
    if (std::isnan(l) || l == kInf) return out;

  const std::size_t count = log_terms.size() - 1;  // number of consecutive ratios
  const std::size_t start = count - count / 4;
  // Zero tail: finitely supported.
  if (std::all_of(log_terms.begin() + static_cast<std::ptrdiff_t>(start), log_terms.end(),
                  [](double l) { return l == kNegInf; })) {
    out.verdict = SeriesVerdict::converges;
    return out;
  }
  double raabe = 0.0, bertrand = 0.0;
  std::size_t used = 0;
  for (std::size_t k = start; k < count; ++k) {
    const double n = static_cast<double>(first_index + k);
    const double diff = log_terms[k] - log_terms[k + 1];
    if (std::isnan(diff)) return out;
    const double rn = n * std::expm1(diff);
    raabe += rn;
    bertrand += std::log(n) * (rn - 1.0);
    ++used;
  }
  out.raabe = raabe / static_cast<double>(used);
  out.bertrand = bertrand / static_cast<double>(used);

  if (!std::isfinite(out.raabe)) {
    out.verdict = out.raabe > 0 ? SeriesVerdict::converges : SeriesVerdict::diverges;
  } else if (out.raabe > 1.1) {
    out.verdict = SeriesVerdict::converges;
  } else if (out.raabe < 0.9) {
    out.verdict = SeriesVerdict::diverges;
  } else if (std::abs(out.raabe - 1.0) <= 0.02) {
    if (out.bertrand > 1.5)
      out.verdict = SeriesVerdict::converges;
    else if (out.bertrand < 0.5 && out.raabe <= 1.0 + 1e-9)
      out.verdict = SeriesVerdict::diverges;
  }
  return out;
}

}  // namespace manin
