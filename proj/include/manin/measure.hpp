#pragma once

// Radial measures rho for the resolution of the identity. Everything is done in
// t = |lambda|^2, where the required moments are
//   int t^j rho(sqrt t) dt = m_j = |q|^{-j(j+1)} w_j / pi,
// and a phase-space integral is  int drho g = sum_i pi mass_i * mean_alpha g(sqrt(t_i) e^{i alpha}).
//
// Absolute continuity of rho is not required here: atomic rules are accepted,
// since only the moment identities enter any downstream computation.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "manin/coherent.hpp"
#include "manin/errors.hpp"
#include "manin/numeric.hpp"
#include "manin/weights.hpp"

namespace manin {

/// Targets m_j = |q|^{-j(j+1)} w_j / pi for j = 0..count-1.
struct MomentSequence {
  std::vector<double> values;
  /// Conditioning scale s = m_1 / m_0 used by the solver (t -> t / s).
  double scale = 1.0;
};

inline MomentSequence radial_moments(const WeightSequence& w, const QParam& q, std::size_t count) {
  MomentSequence out;
  for (std::size_t j = 0; j < count; ++j) {
    const auto jd = static_cast<double>(j);
    const auto jj = static_cast<std::int64_t>(j);
    double m = 0.0;
    if (q.log_abs() == 0.0)
      m = w(jj) / std::numbers::pi;
    else
      m = std::exp(-jd * (jd + 1.0) * q.log_abs() + w.log_weight(jj)) / std::numbers::pi;
    if (!(m > 0.0) || !std::isfinite(m))
      throw NumericalError("moment " + std::to_string(j) + " leaves double range");
    out.values.push_back(m);
  }
  if (out.values.size() >= 2) out.scale = out.values[1] / out.values[0];
  return out;
}

enum class QuadratureProvenance { closed_form, moment_solved };

inline std::string to_string(QuadratureProvenance p) {
  return p == QuadratureProvenance::closed_form ? "closed-form" : "moment-solved";
}

/// Nodes t_i >= 0 and positive masses with sum mass_i t_i^j = m_j for j <= exact_degree.
struct RadialQuadrature {
  std::vector<double> nodes;
  std::vector<double> masses;
  std::size_t order = 0;         // requested M: moments 0..2M-1 are matched
  std::size_t exact_degree = 0;  // highest power of t integrated exactly
  QuadratureProvenance provenance = QuadratureProvenance::moment_solved;
  std::vector<std::string> warnings;
};

/// Known closed-form radial densities.
struct RadialDensity {
  std::string formula;
  /// rho(sqrt t) as a function of t.
  std::function<double(double)> of_t;
  double support_end = kInf;
  double total_mass = 0.0;
  /// Monic three-term recurrence coefficients of the orthogonal polynomials.
  std::function<double(std::size_t)> alpha;
  std::function<double(std::size_t)> beta;  // for k >= 1
};

/// rho(sqrt t) = c e^{-t} / pi for w_n = c n! and |q| = 1; nothing else is tabulated.
inline std::optional<RadialDensity> closed_form_density(const WeightSequence& w, const QParam& q) {
  if (w.kind() != WeightKind::factorial || std::abs(q.log_abs()) > 1e-14) return std::nullopt;
  const double c = w.scale();
  RadialDensity d;
  d.formula = "rho(sqrt t) = " + std::to_string(c) + " * exp(-t) / pi";
  d.of_t = [c](double t) { return c * std::exp(-t) / std::numbers::pi; };
  d.total_mass = c / std::numbers::pi;
  d.alpha = [](std::size_t k) { return 2.0 * static_cast<double>(k) + 1.0; };
  d.beta = [](std::size_t k) { return static_cast<double>(k) * static_cast<double>(k); };
  return d;
}

namespace detail {

using Real = long double;

struct Recurrence {
  std::vector<Real> alpha;
  std::vector<Real> beta;  // beta[0] is the total mass
};

/// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, masses beta_0 v_0^2.
inline void gauss_from_recurrence(const Recurrence& rec, Real scale, std::vector<double>& nodes,
                                  std::vector<double>& masses) {
  const auto n = static_cast<Eigen::Index>(rec.alpha.size());
  Eigen::Matrix<Real, Eigen::Dynamic, 1> diag(n), sub(std::max<Eigen::Index>(n - 1, 0));
  for (Eigen::Index k = 0; k < n; ++k) diag(k) = rec.alpha[static_cast<std::size_t>(k)];
  for (Eigen::Index k = 1; k < n; ++k) sub(k - 1) = std::sqrt(rec.beta[static_cast<std::size_t>(k)]);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw NumericalError("Jacobi matrix eigen-solve failed");
  nodes.clear();
  masses.clear();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Real v0 = es.eigenvectors()(0, k);
    nodes.push_back(static_cast<double>(es.eigenvalues()(k) * scale));
    masses.push_back(static_cast<double>(rec.beta[0] * v0 * v0));
  }
}

struct ChebyshevResult {
  Recurrence rec;
  bool complete = true;  // false: sigma_{k,k} vanished or went negative at k = rec.alpha.size()
};

/// Chebyshev's algorithm: monic recurrence coefficients from moments mu_0..mu_{2M-1}.
inline ChebyshevResult chebyshev_algorithm(const std::vector<Real>& mu, std::size_t order) {
  constexpr Real eps = std::numeric_limits<Real>::epsilon();
  ChebyshevResult out;
  const std::size_t len = 2 * order;
  std::vector<Real> prev(len, 0), cur(mu.begin(), mu.begin() + static_cast<std::ptrdiff_t>(len)), next(len, 0);
  out.rec.alpha.push_back(mu[1] / mu[0]);
  out.rec.beta.push_back(mu[0]);
  for (std::size_t k = 1; k < order; ++k) {
    Real mag = 0;
    for (std::size_t l = k; l + k < len; ++l) {
      const Real a = cur[l + 1], b = out.rec.alpha[k - 1] * cur[l], c = out.rec.beta[k - 1] * prev[l];
      next[l] = a - b - c;
      if (l == k) mag = std::abs(a) + std::abs(b) + std::abs(c);
    }
    if (next[k] <= 1e4L * eps * mag) {
      out.complete = false;
      return out;
    }
    out.rec.alpha.push_back(next[k + 1] / next[k] - cur[k] / cur[k - 1]);
    out.rec.beta.push_back(next[k] / cur[k - 1]);
    std::swap(prev, cur);
    std::swap(cur, next);
  }
  return out;
}

/// Relative moment mismatch of a rule against targets 0..count-1.
inline double max_moment_error(const std::vector<double>& nodes, const std::vector<double>& masses,
                               const std::vector<double>& targets, std::size_t count) {
  double worst = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    Real s = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      s += static_cast<Real>(masses[i]) * std::pow(static_cast<Real>(nodes[i]), static_cast<Real>(j));
    worst = std::max(worst, static_cast<double>(std::abs(s - targets[j]) / targets[j]));
  }
  return worst;
}

/// Clearly negative pivot of the Hankel matrix (Cholesky in long double), if any.
/// The moments only carry double precision, so pivots that are negative by less
/// than 1e-6 of the diagonal entry are attributed to rounding and left to the
/// solver's accuracy check.
inline std::optional<std::size_t> hankel_indefinite_at(const std::vector<Real>& mu, std::size_t order) {
  const auto n = static_cast<Eigen::Index>(order);
  Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> h(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) h(a, b) = mu[static_cast<std::size_t>(a + b)];
  for (Eigen::Index k = 0; k < n; ++k) {
    Real pivot = h(k, k);
    for (Eigen::Index p = 0; p < k; ++p) pivot -= h(k, p) * h(k, p);
    if (pivot < -1e-6L * mu[static_cast<std::size_t>(2 * k)]) return static_cast<std::size_t>(k + 1);
    if (pivot <= 0) return std::nullopt;  // singular at rounding level: left to the solver
    h(k, k) = std::sqrt(pivot);
    for (Eigen::Index r = k + 1; r < n; ++r) {
      Real s = h(r, k);
      for (Eigen::Index p = 0; p < k; ++p) s -= h(r, p) * h(k, p);
      h(r, k) = s / h(k, k);
    }
  }
  return std::nullopt;
}

inline constexpr double kMomentMatchTolerance = 1e-8;
inline constexpr double kFiniteSupportTolerance = 1e-12;
inline constexpr std::size_t kMaxReliableOrder = 20;

/// One attempt at order M; returns nullopt when accuracy or positivity is lost.
inline std::optional<RadialQuadrature> try_moment_rule(const MomentSequence& m, std::size_t order) {
  const Real m0 = m.values[0];
  const Real s = static_cast<Real>(m.scale);
  std::vector<Real> mu;
  for (std::size_t j = 0; j < 2 * order; ++j)
    mu.push_back(static_cast<Real>(m.values[j]) / (m0 * std::pow(s, static_cast<Real>(j))));

  if (auto bad = hankel_indefinite_at(mu, order))
    throw NoPositiveMeasure("Hankel matrix of the moments is indefinite at order " + std::to_string(*bad));

  // An incomplete recurrence is either finite support (the shorter rule then
  // reproduces every moment) or lost accuracy (the moment check below fails).
  const auto cheb = chebyshev_algorithm(mu, order);
  RadialQuadrature rule;
  gauss_from_recurrence(cheb.rec, s, rule.nodes, rule.masses);
  for (double& x : rule.masses) x *= static_cast<double>(m0);
  rule.order = order;
  rule.exact_degree = 2 * order - 1;
  rule.provenance = QuadratureProvenance::moment_solved;
  if (!cheb.complete)
    rule.warnings.push_back("moments are those of a measure supported on " + std::to_string(cheb.rec.alpha.size()) +
                            " point(s)");
  for (double x : rule.masses)
    if (!(x > 0.0)) return std::nullopt;
  for (double t : rule.nodes)
    if (t < -1e-10 * std::max(1.0, static_cast<double>(s))) return std::nullopt;
  // A breakdown is accepted as finite support only if the shorter rule is exact
  // to rounding; a Gauss rule one node short can still pass the 1e-8 bar.
  const double bar = cheb.complete ? kMomentMatchTolerance : kFiniteSupportTolerance;
  if (max_moment_error(rule.nodes, rule.masses, m.values, 2 * order) > bar) return std::nullopt;
  return rule;
}

}  // namespace detail

/// Gauss rule with M nodes matching m_0..m_{2M-1}, via moments -> three-term
/// recurrence (Chebyshev's algorithm, long double, moments rescaled by
/// s = m_1/m_0 and m_0) -> Jacobi matrix eigen-decomposition.
///
/// Orders above 20 are clamped with a warning and, if 20 is still out of reach,
/// fall back to the largest achievable order. Finite-support moment data
/// (e.g. every m_j equal) yields the exact atomic rule with fewer nodes.
inline RadialQuadrature gauss_quadrature_from_moments(const MomentSequence& m, std::size_t order) {
  if (order == 0) throw ConfigError("quadrature order must be positive");
  std::vector<std::string> warnings;
  const bool clamped = order > detail::kMaxReliableOrder;
  if (clamped) {
    warnings.push_back("order " + std::to_string(order) + " clamped to " +
                       std::to_string(detail::kMaxReliableOrder) + " (double-precision conditioning)");
    order = detail::kMaxReliableOrder;
  }
  if (m.values.size() < 2 * order)
    throw ConfigError("order " + std::to_string(order) + " needs " + std::to_string(2 * order) + " moments");
  for (double v : m.values)
    if (!(v > 0.0)) throw NoPositiveMeasure("moments must be positive");

  if (auto rule = detail::try_moment_rule(m, order)) {
    rule->warnings.insert(rule->warnings.begin(), warnings.begin(), warnings.end());
    return *rule;
  }
  std::optional<RadialQuadrature> fallback;
  std::size_t best = 0;
  for (std::size_t lower = order - 1; lower >= 1 && !fallback; --lower) {
    fallback = detail::try_moment_rule(m, lower);
    if (fallback) best = lower;
  }
  // A clamped request already accepted reduced accuracy, so it degrades further;
  // an explicit order within the cap is a hard failure.
  if (clamped && fallback) {
    warnings.push_back("conditioning limits the order to " + std::to_string(best));
    fallback->warnings.insert(fallback->warnings.begin(), warnings.begin(), warnings.end());
    return *fallback;
  }
  throw OrderTooHigh("moment solver lost accuracy at order " + std::to_string(order) +
                         "; largest achievable order is " + std::to_string(best),
                     best);
}

/// Convenience: moments of (w, q) solved at order M.
inline RadialQuadrature gauss_quadrature_for(const WeightSequence& w, const QParam& q, std::size_t order) {
  return gauss_quadrature_from_moments(radial_moments(w, q, 2 * std::min(order, detail::kMaxReliableOrder)), order);
}

/// Gauss rule of a tabulated density from its known recurrence coefficients.
inline RadialQuadrature closed_form_quadrature(const RadialDensity& d, std::size_t order) {
  if (order == 0) throw ConfigError("quadrature order must be positive");
  detail::Recurrence rec;
  for (std::size_t k = 0; k < order; ++k) {
    rec.alpha.push_back(d.alpha(k));
    rec.beta.push_back(k == 0 ? static_cast<detail::Real>(d.total_mass) : static_cast<detail::Real>(d.beta(k)));
  }
  RadialQuadrature out;
  detail::gauss_from_recurrence(rec, 1.0L, out.nodes, out.masses);
  out.order = order;
  out.exact_degree = 2 * order - 1;
  out.provenance = QuadratureProvenance::closed_form;
  return out;
}

/// Closed form when tabulated, otherwise solved from moments.
inline RadialQuadrature radial_quadrature(const WeightSequence& w, const QParam& q, std::size_t order) {
  if (auto d = closed_form_density(w, q)) return closed_form_quadrature(*d, order);
  return gauss_quadrature_for(w, q, order);
}

/// Uniform angles 2 pi a / A + offset.
struct AngularGrid {
  std::size_t points = 1;
  double offset = 0.0;

  double angle(std::size_t a) const {
    return offset + 2.0 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(points);
  }
};

/// Phase-space samples lambda with their weight pi * mass_i / A, so that
/// int drho g = sum weight * g(lambda).
struct PhaseSpaceNode {
  cplx lambda;
  double weight;
};

inline std::vector<PhaseSpaceNode> phase_space_nodes(const RadialQuadrature& quad, const AngularGrid& grid) {
  std::vector<PhaseSpaceNode> out;
  for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
    const double r = std::sqrt(std::max(quad.nodes[i], 0.0));
    for (std::size_t a = 0; a < grid.points; ++a)
      out.push_back({std::polar(r, grid.angle(a)), std::numbers::pi * quad.masses[i] / static_cast<double>(grid.points)});
  }
  return out;
}

/// pi sum_i mass_i t_i^n |q|^{n(n+1)} / w_n, the quadrature value of
/// int drho |lambda|^{2n} |q|^{n(n+1)} w_n^{-1}.
inline double normalization_term(const RadialQuadrature& quad, const WeightSequence& w, const QParam& q,
                                 std::size_t n) {
  const auto nd = static_cast<double>(n);
  detail::Real s = 0;
  for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
    if (quad.nodes[i] <= 0.0 && n > 0) continue;
    const double lt = n == 0 ? 0.0 : nd * std::log(quad.nodes[i]);
    s += static_cast<detail::Real>(quad.masses[i]) *
         std::exp(static_cast<detail::Real>(lt + nd * (nd + 1.0) * q.log_abs() -
                                            w.log_weight(static_cast<std::int64_t>(n))));
  }
  return static_cast<double>(s * std::numbers::pi_v<detail::Real>);
}

struct MomentReport {
  std::vector<double> deviations;  // per index n
  double max_deviation = 0.0;
  bool passed = false;
};

/// |pi sum mass_i t_i^n |q|^{n(n+1)} / w_n - 1| for n = 0..M, i.e. the basis-vector
/// normalization int drho |lambda|^{2n} |q|^{n(n+1)} w_n^{-1} = 1.
inline MomentReport verify_moments(const RadialQuadrature& quad, const WeightSequence& w, const QParam& q,
                                   std::size_t max_index, double tol) {
  MomentReport out;
  for (std::size_t n = 0; n <= max_index; ++n) {
    const double dev = std::abs(normalization_term(quad, w, q, n) - 1.0);
    out.deviations.push_back(dev);
    out.max_deviation = std::max(out.max_deviation, dev);
  }
  out.passed = out.max_deviation <= tol;
  return out;
}

/// Relative mismatch of int_0^R dr rho(r) r^{2j+1} against |q|^{-j(j+1)} w_j / (2 pi),
/// j = 0..J, by adaptive Gauss-Kronrod integration of the density in r.
inline MomentReport verify_density_moments(const RadialDensity& d, const WeightSequence& w, const QParam& q,
                                           std::size_t max_index, double tol) {
  MomentReport out;
  for (std::size_t j = 0; j <= max_index; ++j) {
    const auto jd = static_cast<double>(j);
    auto f = [&](double r) { return r == 0.0 && j == 0 ? 0.0 : d.of_t(r * r) * std::pow(r, 2.0 * jd + 1.0); };
    double err = 0.0;
    const double upper = d.support_end == kInf ? kInf : std::sqrt(d.support_end);
    const double got = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, upper, 20, 1e-14, &err);
    const double want = std::exp(-jd * (jd + 1.0) * q.log_abs() + w.log_weight(static_cast<std::int64_t>(j))) /
                        (2.0 * std::numbers::pi);
    const double dev = std::abs(got - want) / want;
    out.deviations.push_back(dev);
    out.max_deviation = std::max(out.max_deviation, dev);
  }
  out.passed = out.max_deviation <= tol;
  return out;
}

struct GramReport {
  Eigen::MatrixXcd gram;
  double max_deviation = 0.0;
  bool passed = false;
};

/// G[j][k] = int drho <phi_j, phi_lambda><phi_lambda, phi_k> for j, k <= M, which
/// the resolution of the identity requires to be the identity.
inline GramReport verify_resolution_identity(const RadialQuadrature& quad, const WeightSequence& w, const QParam& q,
                                             std::size_t basis_size, AngularGrid grid, double tol) {
  if (grid.points < 2 * basis_size + 1)
    throw InsufficientQuadrature("need at least " + std::to_string(2 * basis_size + 1) + " angular points");
  if (quad.exact_degree < basis_size)
    throw InsufficientQuadrature("radial rule not exact up to t^" + std::to_string(basis_size));
  const auto dim = static_cast<Eigen::Index>(basis_size + 1);
  GramReport out;
  out.gram = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::VectorXcd a(dim);
  for (const auto& node : phase_space_nodes(quad, grid)) {
    for (Eigen::Index j = 0; j < dim; ++j) a(j) = coherent_coefficient(node.lambda, j, w, q).value();
    out.gram += node.weight * a * a.adjoint();
  }
  out.max_deviation = (out.gram - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff();
  out.passed = out.max_deviation <= tol;
  return out;
}

struct DivergenceWitness {
  std::vector<double> terms;         // int drho |lambda|^{2n}|q|^{n(n+1)}/w_n, each ideally 1
  std::vector<double> partial_sums;  // ideally n + 1
  double slope = 0.0;                // least-squares slope of partial sums against n
};

/// Partial sums of int drho ||phi_lambda||^2, which grow like N + 1.
inline DivergenceWitness norm_divergence_witness(const RadialQuadrature& quad, const WeightSequence& w,
                                                 const QParam& q, std::size_t max_index) {
  DivergenceWitness out;
  double acc = 0.0;
  std::vector<double> xs;
  for (std::size_t n = 0; n <= max_index; ++n) {
    const double term = normalization_term(quad, w, q, n);
    out.terms.push_back(term);
    acc += term;
    out.partial_sums.push_back(acc);
    xs.push_back(static_cast<double>(n));
  }
  if (xs.size() >= 2) out.slope = detail::ls_slope(xs, out.partial_sums);
  return out;
}

}  // namespace manin
