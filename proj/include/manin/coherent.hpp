#pragma once

// Coherent states phi_lambda = sum_n lambda^n q^{n(n+1)/2} w_n^{-1/2} phi_n, their
// norms, the coherent state transform and the reproducing kernel.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "manin/errors.hpp"
#include "manin/numeric.hpp"
#include "manin/radius.hpp"
#include "manin/toeplitz.hpp"
#include "manin/weights.hpp"

namespace manin {

inline constexpr double kDefaultTolerance = 1e-15;
inline constexpr std::size_t kMaxCoherentTerms = 1U << 15;

/// a_n(lambda) = lambda^n q^{n(n+1)/2} w_n^{-1/2}, in log-polar form.
inline LogPolar coherent_coefficient(cplx lambda, std::int64_t n, const WeightSequence& w, const QParam& q) {
  if (n == 0) return {-0.5 * w.log_weight(0), 0.0};
  if (lambda == cplx{0.0, 0.0}) return {};
  const auto nd = static_cast<double>(n);
  const auto tri = static_cast<double>(detail::triangular(n));
  return {nd * std::log(std::abs(lambda)) + tri * q.log_abs() - 0.5 * w.log_weight(n),
          wrap_phase(nd * std::arg(lambda) + tri * q.arg())};
}

/// Truncated coherent state a_0..a_N with a certificate on the discarded tail.
class CoherentStateVector {
 public:
  CoherentStateVector(cplx lambda, std::vector<LogPolar> coeffs, double log_norm_sq, double log_tail_bound)
      : lambda_(lambda), coeffs_(std::move(coeffs)), log_norm_sq_(log_norm_sq), log_tail_(log_tail_bound) {}

  cplx lambda() const { return lambda_; }
  std::span<const LogPolar> coefficients() const { return coeffs_; }
  std::size_t cutoff() const { return coeffs_.size() - 1; }
  /// log of sum_{n<=N} |a_n|^2.
  double log_norm_sq() const { return log_norm_sq_; }
  double norm_sq() const { return std::exp(log_norm_sq_); }
  /// log of a bound on sum_{n>N} |a_n|^2.
  double log_tail_bound() const { return log_tail_; }
  double tail_bound() const { return std::exp(log_tail_); }
  cplx coefficient(std::size_t n) const { return coeffs_.at(n).value(); }

  /// Largest log|a_n|; subtracting it keeps every coefficient representable.
  double log_scale() const {
    double m = kNegInf;
    for (const auto& c : coeffs_) m = std::max(m, c.log_abs);
    return m;
  }

  /// Coefficients times exp(-shift), padded with zeros to `dim` if requested.
  Eigen::VectorXcd scaled_vector(double shift, Eigen::Index dim = -1) const {
    const Eigen::Index n = dim < 0 ? static_cast<Eigen::Index>(coeffs_.size()) : dim;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
    for (Eigen::Index k = 0; k < std::min<Eigen::Index>(n, static_cast<Eigen::Index>(coeffs_.size())); ++k)
      v(k) = coeffs_[static_cast<std::size_t>(k)].scaled(shift);
    return v;
  }

 private:
  friend CoherentStateVector evolve_state(const CoherentStateVector&, double);

  cplx lambda_;
  std::vector<LogPolar> coeffs_;
  double log_norm_sq_;
  double log_tail_;
};

namespace detail {

struct CertifiedSum {
  std::size_t cutoff = 0;
  double log_sum = kNegInf;
  double log_tail = kNegInf;
};

inline constexpr std::size_t kLookahead = 32;

/// Sums ||phi_lambda||^2 = sum |lambda|^{2n} |q|^{n(n+1)} / w_n until the tail is
/// below tol times the partial sum.
///
/// The tail certificate is geometric: if the term ratios after N are below 1 and
/// non-increasing across a 32-term lookahead (assumed to persist beyond it), then
/// sum_{k>N} b_k <= b_{N+1} / (1 - b_{N+2}/b_{N+1}). An explicit weight table
/// shortens the lookahead to what the table holds, down to 8 ratios.
inline CertifiedSum certified_norm_sum(double abs_lambda, const WeightSequence& w, const QParam& q, double tol,
                                       std::size_t max_terms = kMaxCoherentTerms) {
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  CertifiedSum out;
  if (abs_lambda == 0.0) {
    out.log_sum = -w.log_weight(0);
    return out;
  }
  const double log_lam = std::log(abs_lambda);
  const double log_tol = std::log(tol);
  auto term = [&](std::size_t n) { return log_norm_term(log_lam, w, q, static_cast<std::int64_t>(n)); };

  std::vector<double> cache;  // cache[n] = log b_n
  auto b = [&](std::size_t n) {
    while (cache.size() <= n) cache.push_back(term(cache.size()));
    return cache[n];
  };

  // b(n) is defined for n <= table_end.
  const std::size_t table_end = w.horizon().value_or(std::numeric_limits<std::size_t>::max() / 2);
  const std::size_t limit = std::min(max_terms, table_end >= 10 ? table_end - 9 : 0);

  std::size_t growth_run = 0;  // consecutive non-decreasing ratios with ratio >= 1
  double prev_lr = kNegInf;
  for (std::size_t n = 0; n < limit; ++n) {
    out.log_sum = log_add_exp(out.log_sum, b(n));
    const double lr = b(n + 1) - b(n);
    if (lr >= 0.0 && lr >= prev_lr - 1e-12) {
      if (++growth_run >= 64)
        throw OutsidePhaseSpace("coherent state series sum |lambda|^{2n}|q|^{n(n+1)}/w_n diverges at |lambda| = " +
                                std::to_string(abs_lambda) + " (terms grow without bound)");
    } else {
      growth_run = 0;
    }
    prev_lr = lr;
    if (lr >= 0.0) continue;

    // Try to certify the tail after N = n.
    bool monotone = true;
    double first_lr = b(n + 2) - b(n + 1);
    double last = first_lr;
    if (!(first_lr < 0.0)) continue;
    for (std::size_t k = n + 2; k < std::min(n + 1 + kLookahead, table_end); ++k) {
      const double lk = b(k + 1) - b(k);
      if (lk > last + 1e-12 * std::max(1.0, std::abs(last))) {
        monotone = false;
        break;
      }
      last = lk;
    }
    if (!monotone) continue;
    const double log_tail = b(n + 1) - std::log1p(-std::exp(first_lr));
    if (log_tail <= log_tol + out.log_sum) {
      out.cutoff = n;
      out.log_tail = log_tail;
      return out;
    }
  }
  if (limit < max_terms)
    throw ToleranceUnreachable("coherent state tail not certified within the weight table (horizon " +
                               std::to_string(table_end) + ")");
  if (prev_lr >= 0.0)
    throw OutsidePhaseSpace("coherent state series diverges at |lambda| = " + std::to_string(abs_lambda));
  throw ToleranceUnreachable("coherent state tail not certified within " + std::to_string(max_terms) + " terms");
}

}  // namespace detail

/// Coefficients a_0..a_N of phi_lambda, with N chosen so the certified tail is at
/// most tol * ||truncation||^2. a_0 = w_0^{-1/2}.
inline CoherentStateVector coherent_coefficients(cplx lambda, const WeightSequence& w, const QParam& q,
                                                 double tol = kDefaultTolerance) {
  const auto sum = detail::certified_norm_sum(std::abs(lambda), w, q, tol);
  std::vector<LogPolar> coeffs;
  coeffs.reserve(sum.cutoff + 1);
  for (std::size_t n = 0; n <= sum.cutoff; ++n)
    coeffs.push_back(coherent_coefficient(lambda, static_cast<std::int64_t>(n), w, q));
  return {lambda, std::move(coeffs), sum.log_sum, sum.log_tail};
}

/// Coefficients a_0..a_N for a fixed N, without any tail certificate (tail bound = inf).
inline CoherentStateVector coherent_coefficients_fixed(cplx lambda, const WeightSequence& w, const QParam& q,
                                                       std::size_t cutoff) {
  std::vector<LogPolar> coeffs;
  double log_norm = kNegInf;
  for (std::size_t n = 0; n <= cutoff; ++n) {
    coeffs.push_back(coherent_coefficient(lambda, static_cast<std::int64_t>(n), w, q));
    log_norm = log_add_exp(log_norm, 2.0 * coeffs.back().log_abs);
  }
  return {lambda, std::move(coeffs), log_norm, kInf};
}

/// log ||phi_lambda||^2, certified to relative tol.
inline double coherent_log_norm_sq(cplx lambda, const WeightSequence& w, const QParam& q,
                                   double tol = kDefaultTolerance) {
  return detail::certified_norm_sum(std::abs(lambda), w, q, tol).log_sum;
}

/// ||phi_lambda||^2 = sum |lambda|^{2n} |q|^{n(n+1)} / w_n.
inline double coherent_norm_sq(cplx lambda, const WeightSequence& w, const QParam& q,
                               double tol = kDefaultTolerance) {
  const double v = std::exp(coherent_log_norm_sq(lambda, w, q, tol));
  if (!std::isfinite(v)) throw NumericalError("||phi_lambda||^2 exceeds double range; use coherent_log_norm_sq");
  return v;
}

struct EigenResidual {
  /// ||(T psi - lambda psi)_{0..N-1}|| / ||psi||, the part the truncation can see.
  double residual = 0.0;
  /// |lambda a_N| / ||psi||: the window-edge row, caused only by truncation.
  double leakage = 0.0;
  /// |q|^{-(N+1)} (w_{N+1}/w_N)^{1/2} sqrt(tail_bound) / ||psi||, which bounds the leakage.
  double edge_bound = 0.0;
};

/// Checks T_thetabar phi_lambda = lambda phi_lambda on the truncation.
inline EigenResidual eigen_residual(const CoherentStateVector& state, const WeightSequence& w, const QParam& q) {
  EigenResidual out;
  const cplx lambda = state.lambda();
  const std::size_t cutoff = state.cutoff();
  if (cutoff == 0) {
    out.leakage = std::abs(lambda);  // zero when lambda = 0
    out.edge_bound = std::isfinite(state.log_tail_bound())
                         ? std::exp(-q.log_abs() + 0.5 * w.log_weight(1) - 0.5 * w.log_weight(0) +
                                    0.5 * (state.log_tail_bound() - state.log_norm_sq()))
                         : kInf;
    return out;
  }
  const double shift = state.log_scale();
  const Eigen::VectorXcd psi = state.scaled_vector(shift);
  const auto t = annihilation_matrix(w, q, cutoff);
  const Eigen::VectorXcd r = t.entries() * psi - lambda * psi;
  const auto n = static_cast<Eigen::Index>(cutoff);
  const double norm = psi.norm();
  out.residual = r.head(n).norm() / norm;
  out.leakage = std::abs(r(n)) / norm;
  const auto nn = static_cast<double>(cutoff);
  const double log_edge = -(nn + 1.0) * q.log_abs() +
                          0.5 * (w.log_weight(static_cast<std::int64_t>(cutoff) + 1) -
                                 w.log_weight(static_cast<std::int64_t>(cutoff)));
  out.edge_bound = std::exp(log_edge + 0.5 * (state.log_tail_bound() - state.log_norm_sq()));
  return out;
}

/// Phase-space flow generated by N: lambda -> lambda e^{-it}.
inline cplx evolve(cplx lambda, double t) { return lambda * std::polar(1.0, -t); }

/// e^{-itN} applied to a state: coefficient n picks up e^{-itn}.
inline CoherentStateVector evolve_state(const CoherentStateVector& state, double t) {
  CoherentStateVector out = state;
  for (std::size_t n = 0; n < out.coeffs_.size(); ++n)
    if (!out.coeffs_[n].is_zero())
      out.coeffs_[n].phase = wrap_phase(out.coeffs_[n].phase - t * static_cast<double>(n));
  out.lambda_ = evolve(state.lambda(), t);
  return out;
}

/// Throws OutsidePhaseSpace unless the coherent series converges at lambda.
inline void require_in_phase_space(cplx lambda, const WeightSequence& w, const QParam& q) {
  (void)detail::certified_norm_sum(std::abs(lambda), w, q, 1e-12);
}

/// (C psi)(lambda) = <phi_lambda, psi> = sum_k conj(lambda)^k conj(q)^{k(k+1)/2} w_k^{-1/2} c_k.
inline cplx cs_transform(std::span<const cplx> psi, cplx lambda, const WeightSequence& w, const QParam& q) {
  require_in_phase_space(lambda, w, q);
  cplx sum{0.0, 0.0};
  for (std::size_t k = 0; k < psi.size(); ++k) {
    if (psi[k] == cplx{0.0, 0.0}) continue;
    sum += coherent_coefficient(lambda, static_cast<std::int64_t>(k), w, q).conj().value() * psi[k];
  }
  detail::require_finite(sum, "coherent state transform");
  return sum;
}

/// K(mu, lambda) = <phi_mu, phi_lambda> = sum_n conj(mu)^n lambda^n |q|^{n(n+1)} / w_n.
/// Summed to the larger of the two certified cutoffs; the error is below
/// sqrt(tail_mu tail_lambda) by Cauchy-Schwarz.
inline cplx kernel(cplx mu, cplx lambda, const WeightSequence& w, const QParam& q, double tol = kDefaultTolerance) {
  const auto sm = detail::certified_norm_sum(std::abs(mu), w, q, tol);
  const auto sl = detail::certified_norm_sum(std::abs(lambda), w, q, tol);
  const std::size_t cutoff = std::max(sm.cutoff, sl.cutoff);
  std::vector<LogPolar> terms;
  double shift = kNegInf;
  const double lm = std::log(std::abs(mu)), ll = std::log(std::abs(lambda));
  const double phase_step = std::arg(lambda) - std::arg(mu);
  for (std::size_t n = 0; n <= cutoff; ++n) {
    const auto nd = static_cast<double>(n);
    LogPolar t;
    if (n == 0) {
      t = {-w.log_weight(0), 0.0};
    } else if (mu == cplx{0.0, 0.0} || lambda == cplx{0.0, 0.0}) {
      break;
    } else {
      t = {nd * (lm + ll) + nd * (nd + 1.0) * q.log_abs() - w.log_weight(static_cast<std::int64_t>(n)),
           wrap_phase(nd * phase_step)};
    }
    terms.push_back(t);
    shift = std::max(shift, t.log_abs);
  }
  cplx sum{0.0, 0.0};
  for (const auto& t : terms) sum += t.scaled(shift);
  const cplx out = sum * std::exp(shift);
  detail::require_finite(out, "reproducing kernel");
  return out;
}

}  // namespace manin
