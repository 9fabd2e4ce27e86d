#pragma once

// Symbol calculus: lower symbols of truncated operators, coherent state
// quantization Q_cs f = int f |phi_lambda><phi_lambda| drho, and the secondary
// Toeplitz quantization S_f on the Segal-Bargmann basis e_k(lambda) = conj(a_k(lambda)).
//
// Upper symbols are polynomials in lambda and conj(lambda); with a radial
// Gauss rule and enough uniform angles every integral below is exact.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "manin/coherent.hpp"
#include "manin/errors.hpp"
#include "manin/measure.hpp"
#include "manin/toeplitz.hpp"
#include "manin/weights.hpp"

namespace manin {

/// f(lambda) = sum c_{a,b} lambda^a conj(lambda)^b.
class PolynomialSymbol {
 public:
  using Key = std::pair<std::uint32_t, std::uint32_t>;

  PolynomialSymbol() = default;

  static PolynomialSymbol constant(cplx c) { return monomial(0, 0, c); }
  static PolynomialSymbol monomial(std::uint32_t a, std::uint32_t b, cplx c = 1.0) {
    PolynomialSymbol f;
    f.add(a, b, c);
    return f;
  }

  PolynomialSymbol& add(std::uint32_t a, std::uint32_t b, cplx c) {
    detail::require_finite(c, "symbol coefficient");
    auto& slot = coeffs_[{a, b}];
    slot += c;
    if (slot == cplx{}) coeffs_.erase({a, b});
    return *this;
  }

  const std::map<Key, cplx>& coefficients() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }

  /// f*: (a, b) -> (b, a) with conjugated coefficients.
  PolynomialSymbol conj() const {
    PolynomialSymbol out;
    for (const auto& [k, c] : coeffs_) out.add(k.second, k.first, std::conj(c));
    return out;
  }

  cplx operator()(cplx lambda) const {
    cplx s{};
    for (const auto& [k, c] : coeffs_)
      s += c * std::pow(lambda, static_cast<int>(k.first)) * std::pow(std::conj(lambda), static_cast<int>(k.second));
    return s;
  }

  /// max a + b.
  std::uint32_t degree() const {
    std::uint32_t d = 0;
    for (const auto& [k, c] : coeffs_) d = std::max(d, k.first + k.second);
    return d;
  }

  /// max min(a, b): with k, n <= N the radial integrand is at most t^{N + this}.
  std::uint32_t radial_excess() const {
    std::uint32_t d = 0;
    for (const auto& [k, c] : coeffs_) d = std::max(d, std::min(k.first, k.second));
    return d;
  }

  std::string describe() const {
    if (coeffs_.empty()) return "0";
    std::string s;
    for (const auto& [k, c] : coeffs_) {
      if (!s.empty()) s += " + ";
      s += "(" + std::to_string(c.real()) + (c.imag() < 0 ? "" : "+") + std::to_string(c.imag()) + "i)";
      if (k.first) s += " L^" + std::to_string(k.first);
      if (k.second) s += " Lc^" + std::to_string(k.second);
    }
    return s;
  }

  friend PolynomialSymbol operator+(PolynomialSymbol a, const PolynomialSymbol& b) {
    for (const auto& [k, c] : b.coeffs_) a.add(k.first, k.second, c);
    return a;
  }
  friend PolynomialSymbol operator*(cplx s, const PolynomialSymbol& f) {
    PolynomialSymbol out;
    for (const auto& [k, c] : f.coeffs_) out.add(k.first, k.second, s * c);
    return out;
  }
  friend bool operator==(const PolynomialSymbol&, const PolynomialSymbol&) = default;

 private:
  std::map<Key, cplx> coeffs_;
};

struct LowerSymbol {
  cplx value;
  double truncation_error = 0.0;  // estimate of the neglected coherent tail's contribution
};

namespace detail {

/// Largest |m - n| with a non-zero entry.
inline Eigen::Index bandwidth(const Eigen::MatrixXcd& a) {
  Eigen::Index reach = 0;
  for (Eigen::Index n = 0; n < a.cols(); ++n)
    for (Eigen::Index m = 0; m < a.rows(); ++m)
      if (a(m, n) != cplx{}) reach = std::max(reach, m > n ? m - n : n - m);
  return reach;
}

}  // namespace detail

/// A^#(lambda) = <phi_lambda, A phi_lambda>, or A^flat = A^# / ||phi_lambda||^2 when
/// `normalized`, on the operator's window.
///
/// The coherent vector is cut where its certified tail drops below tol. That cut
/// must lie inside the window; for a truncation of an infinite operator
/// (meta().exact false) it must also leave room for the operator's band reach.
/// The reported error bounds the cross terms with the neglected tail by the
/// largest entry in the edge band.
inline LowerSymbol lower_symbol(const TruncatedOperator& a, cplx lambda, const WeightSequence& w, const QParam& q,
                                bool normalized, double tol = kDefaultTolerance) {
  const auto state = coherent_coefficients(lambda, w, q, tol);
  const Eigen::Index reach = detail::bandwidth(a.entries());
  const auto needed = static_cast<Eigen::Index>(state.cutoff()) + (a.exact() ? 0 : reach);
  if (needed > static_cast<Eigen::Index>(a.cutoff()))
    throw ConfigError("operator window N = " + std::to_string(a.cutoff()) + " too narrow at |lambda| = " +
                      std::to_string(std::abs(lambda)) + ": need N >= " + std::to_string(needed));

  const double shift = state.log_scale();
  const Eigen::VectorXcd v = state.scaled_vector(shift, a.dim());
  const cplx form = v.dot(a.entries() * v);  // dot conjugates its left argument
  const double vv = v.squaredNorm();

  const Eigen::Index edge = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(a.dim()) - reach - 1);
  double amax = 0.0;
  for (Eigen::Index m = 0; m < a.entries().rows(); ++m)
    for (Eigen::Index n = 0; n < a.entries().cols(); ++n)
      if (m >= edge || n >= edge) amax = std::max(amax, std::abs(a(m, n)));
  // Relative tail of ||phi||^2 beyond the cut, then the cross and tail-tail terms.
  const double rel_tail = std::exp(state.log_tail_bound() - state.log_norm_sq());
  const double rel_err = amax * static_cast<double>(2 * reach + 1) * (2.0 * std::sqrt(rel_tail) + rel_tail);

  LowerSymbol out;
  if (normalized) {
    out.value = form / vv;
    out.truncation_error = rel_err;
  } else {
    const double scale = std::exp(2.0 * shift);
    out.value = form * scale;
    out.truncation_error = rel_err * vv * scale;
  }
  detail::require_finite(out.value, "lower symbol");
  return out;
}

/// (T_theta)^#(lambda) = conj(lambda) sum_n |lambda|^{2n} |q|^{n(n+1)} conj(q)^{n+1} / w_n,
/// summed term by term; there is no closed form for q != 1.
inline LowerSymbol creation_lower_symbol_series(cplx lambda, const WeightSequence& w, const QParam& q,
                                                double tol = kDefaultTolerance) {
  require_in_phase_space(lambda, w, q);
  if (lambda == cplx{}) return {0.0, 0.0};
  const double log_lam = std::log(std::abs(lambda));
  // Plain complex sum, rescaled to the largest term seen so far.
  cplx acc{};
  double ref = kNegInf;
  std::size_t quiet = 0;
  double last_term = kNegInf;
  for (std::size_t n = 0; n < kMaxCoherentTerms; ++n) {
    const auto nd = static_cast<double>(n);
    const double mag = detail::log_norm_term(log_lam, w, q, static_cast<std::int64_t>(n)) + (nd + 1.0) * q.log_abs();
    const double phase = -(nd + 1.0) * q.arg();
    if (mag > ref) {
      if (ref != kNegInf) acc *= std::exp(ref - mag);
      ref = mag;
    }
    acc += std::polar(std::exp(mag - ref), phase);
    const bool small = mag - ref < std::log(tol) && mag <= last_term;
    quiet = small ? quiet + 1 : 0;
    last_term = mag;
    if (quiet >= detail::kLookahead) {
      LogPolar total = LogPolar::from(acc);
      total.log_abs += ref;
      total = total * LogPolar::from(std::conj(lambda));
      return {total.value(), std::exp(mag - ref) * std::abs(total.value())};
    }
  }
  throw ToleranceUnreachable("creation symbol series did not settle within " + std::to_string(kMaxCoherentTerms) +
                             " terms");
}

/// Lower symbol values over a set of points.
struct SymbolValueGrid {
  std::vector<cplx> lambdas;
  std::vector<cplx> values;
  std::vector<double> errors;
};

/// rings x spokes points at radii radius * (k + 1) / rings, angles 2 pi s / spokes + offset.
inline std::vector<cplx> polar_grid(double radius, std::size_t rings, std::size_t spokes, double offset = 0.0) {
  std::vector<cplx> out;
  for (std::size_t k = 0; k < rings; ++k)
    for (std::size_t s = 0; s < spokes; ++s)
      out.push_back(std::polar(radius * static_cast<double>(k + 1) / static_cast<double>(rings),
                               offset + 2.0 * std::numbers::pi * static_cast<double>(s) / static_cast<double>(spokes)));
  return out;
}

inline SymbolValueGrid lower_symbol_grid(const TruncatedOperator& a, const std::vector<cplx>& lambdas,
                                         const WeightSequence& w, const QParam& q, bool normalized,
                                         double tol = kDefaultTolerance) {
  SymbolValueGrid out;
  for (cplx l : lambdas) {
    const auto s = lower_symbol(a, l, w, q, normalized, tol);
    out.lambdas.push_back(l);
    out.values.push_back(s.value);
    out.errors.push_back(s.truncation_error);
  }
  return out;
}

namespace detail {

/// Checks that the radial rule and the angular grid integrate the
/// polynomial integrands of an (N+1)-dimensional matrix of f exactly.
inline AngularGrid quantization_grid(const PolynomialSymbol& f, const RadialQuadrature& quad, std::size_t cutoff,
                                     std::optional<std::size_t> angular_points) {
  const std::size_t need_radial = cutoff + f.radial_excess();
  if (quad.exact_degree < need_radial)
    throw InsufficientQuadrature("radial rule exact to t^" + std::to_string(quad.exact_degree) + ", need t^" +
                                 std::to_string(need_radial) + " (raise the quadrature order)");
  const std::size_t need_angles = 2 * (cutoff + f.degree()) + 1;
  const std::size_t a = angular_points.value_or(need_angles);
  if (a < need_angles)
    throw InsufficientQuadrature("need at least " + std::to_string(need_angles) + " angular points, got " +
                                 std::to_string(a));
  return {a, 0.0};
}

/// lambda^a conj(lambda)^b moves phi_n to phi_{n+b-a}: raising terms leave the window.
inline OperatorMeta symbol_meta(const std::string& kind, const PolynomialSymbol& f, const WeightSequence& w,
                                const QParam& q) {
  auto meta = make_meta(kind + "[" + f.describe() + "]", w, q);
  for (const auto& [k, c] : f.coefficients())
    if (k.second > k.first) meta.exact = false;
  return meta;
}

inline Eigen::VectorXcd coherent_row(cplx lambda, const WeightSequence& w, const QParam& q, Eigen::Index dim) {
  Eigen::VectorXcd a(dim);
  for (Eigen::Index k = 0; k < dim; ++k) a(k) = coherent_coefficient(lambda, k, w, q).value();
  return a;
}

}  // namespace detail

/// <phi_k, Q_cs(f) phi_n> = int drho f(lambda) a_k(lambda) conj(a_n(lambda)), k, n <= N.
inline TruncatedOperator quantize_cs(const PolynomialSymbol& f, const RadialQuadrature& quad,
                                     const WeightSequence& w, const QParam& q, std::size_t cutoff,
                                     std::optional<std::size_t> angular_points = std::nullopt) {
  const AngularGrid grid = detail::quantization_grid(f, quad, cutoff, angular_points);
  const auto dim = static_cast<Eigen::Index>(cutoff + 1);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& node : phase_space_nodes(quad, grid)) {
    const cplx fv = f(node.lambda);
    if (fv == cplx{}) continue;
    const Eigen::VectorXcd a = detail::coherent_row(node.lambda, w, q, dim);
    m.noalias() += (node.weight * fv) * a * a.adjoint();
  }
  return TruncatedOperator(std::move(m), detail::symbol_meta("Qcs", f, w, q));
}

/// Quadrature value of ||f||_1 = int |f(lambda)| ||phi_lambda||^2 drho on the same
/// grid quantize_cs uses for an N x N window (N = 0 when only the bound is wanted).
/// This is a finite-rule estimate: when rho has unbounded support the exact
/// L^1 norm can be infinite, and the estimate then grows with the order.
inline double quantize_cs_norm_bound(const PolynomialSymbol& f, const RadialQuadrature& quad,
                                     const WeightSequence& w, const QParam& q, std::size_t cutoff = 0,
                                     std::optional<std::size_t> angular_points = std::nullopt) {
  if (f.is_zero()) return 0.0;
  const AngularGrid grid = detail::quantization_grid(f, quad, cutoff, angular_points);
  double total = 0.0;
  for (const auto& node : phase_space_nodes(quad, grid)) {
    const double fv = std::abs(f(node.lambda));
    if (fv == 0.0) continue;
    try {
      total += node.weight * fv * coherent_norm_sq(node.lambda, w, q);
    } catch (const OutsidePhaseSpace&) {
      return kInf;  // a node on the boundary where ||phi_lambda|| diverges
    }
  }
  return total;
}

/// Matrix of S_f = P_K(f .) in the orthonormal basis e_k(lambda) = conj(a_k(lambda))
/// of the Segal-Bargmann space: entries <e_j, f e_k> in L^2(rho).
inline TruncatedOperator secondary_toeplitz(const PolynomialSymbol& f, const RadialQuadrature& quad,
                                            const WeightSequence& w, const QParam& q, std::size_t cutoff,
                                            std::optional<std::size_t> angular_points = std::nullopt) {
  const AngularGrid grid = detail::quantization_grid(f, quad, cutoff, angular_points);
  const auto dim = static_cast<Eigen::Index>(cutoff + 1);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& node : phase_space_nodes(quad, grid)) {
    const cplx fv = f(node.lambda);
    if (fv == cplx{}) continue;
    const Eigen::VectorXcd e = detail::coherent_row(node.lambda, w, q, dim).conjugate();
    // <e_j, f e_k> = sum weight * conj(e_j) f e_k
    m.noalias() += (node.weight * fv) * e.conjugate() * e.transpose();
  }
  return TruncatedOperator(std::move(m), detail::symbol_meta("S", f, w, q));
}

}  // namespace manin
