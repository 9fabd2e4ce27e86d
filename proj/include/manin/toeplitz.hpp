#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>

#include "manin/algebra.hpp"
#include "manin/numeric.hpp"
#include "manin/weights.hpp"

namespace manin {

struct OperatorMeta {
  std::string symbol;
  std::string weights;
  cplx q{1.0, 0.0};
  /// False when some image vector had components past the cutoff window.
  bool exact = true;
};

/// An operator compressed to span{phi_0, ..., phi_N}: entry (m, n) = <phi_m, A phi_n>.
class TruncatedOperator {
 public:
  TruncatedOperator(Eigen::MatrixXcd entries, OperatorMeta meta)
      : entries_(std::move(entries)), meta_(std::move(meta)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0)
      throw ConfigError("truncated operator must be a non-empty square matrix");
    if (!entries_.allFinite()) throw NumericalError("operator '" + meta_.symbol + "' has non-finite entries");
  }

  Eigen::Index dim() const { return entries_.rows(); }
  std::size_t cutoff() const { return static_cast<std::size_t>(entries_.rows() - 1); }
  const Eigen::MatrixXcd& entries() const { return entries_; }
  const OperatorMeta& meta() const { return meta_; }
  bool exact() const { return meta_.exact; }
  cplx operator()(Eigen::Index m, Eigen::Index n) const { return entries_(m, n); }

  TruncatedOperator adjoint() const {
    OperatorMeta meta = meta_;
    meta.symbol = "(" + meta_.symbol + ")*";
    return {entries_.adjoint(), meta};
  }

 private:
  Eigen::MatrixXcd entries_;
  OperatorMeta meta_;
};

namespace detail {

inline OperatorMeta make_meta(std::string symbol, const WeightSequence& w, const QParam& q) {
  return {std::move(symbol), w.describe(), q.value(), true};
}

/// w_{n+i} / (w_n w_{n+i-j})^{1/2}.
inline double toeplitz_weight_factor(const WeightSequence& w, std::int64_t n, std::int64_t i, std::int64_t j) {
  const double top = w(n + i), a = w(n), b = w(n + i - j);
  if (std::isnormal(top) && std::isnormal(a) && std::isnormal(b)) {
    // the diagonal and pure-raising cases keep exact ratios (g = 1 gives exactly I)
    if (j == 0) return std::sqrt(top / a);
    if (i == j) return top / a;
    return top / std::sqrt(a) / std::sqrt(b);
  }
  return std::exp(w.log_weight(n + i) - 0.5 * w.log_weight(n) - 0.5 * w.log_weight(n + i - j));
}

inline std::string describe(const ManinElement& g) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, series] : g.terms()) {
    if (!first) os << " + ";
    first = false;
    const cplx c = g.evaluate(series);
    os << "(" << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i)";
    if (m.i) os << " th^" << m.i;
    if (m.j) os << " tb^" << m.j;
  }
  return first ? "0" : os.str();
}

}  // namespace detail

/// Matrix of T_g = P(g . ) for a symbol g, columns n = 0..cutoff:
/// T_{theta^i thetabar^j} phi_n = q^{-jn} w_{n+i} (w_n w_{n+i-j})^{-1/2} phi_{n+i-j}.
inline TruncatedOperator toeplitz_matrix(const ManinElement& g, const WeightSequence& w, std::size_t cutoff) {
  const auto dim = static_cast<Eigen::Index>(cutoff + 1);
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(dim, dim);
  OperatorMeta meta = detail::make_meta(detail::describe(g), w, g.q());
  for (const auto& [m, series] : g.terms()) {
    const std::int64_t i = m.i, j = m.j;
    for (std::int64_t n = 0; n < dim; ++n) {
      const std::int64_t target = n + i - j;
      if (target < 0) continue;
      if (target >= dim) {
        meta.exact = false;
        continue;
      }
      const double factor = detail::toeplitz_weight_factor(w, n, i, j);
      const std::int64_t shift = -detail::checked_mul(j, n);
      cplx entry{0.0, 0.0};
      for (const auto& [e, c] : series) entry += c * g.q().pow(detail::checked_add(e, shift));
      t(target, n) += entry * factor;
    }
  }
  return {std::move(t), std::move(meta)};
}

/// T_thetabar: phi_n -> q^{-n} (w_n / w_{n-1})^{1/2} phi_{n-1}.
inline TruncatedOperator annihilation_matrix(const WeightSequence& w, const QParam& q, std::size_t cutoff) {
  const auto dim = static_cast<Eigen::Index>(cutoff + 1);
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index n = 1; n < dim; ++n) t(n - 1, n) = q.pow(-n) * std::sqrt(w.ratio(n, n - 1));
  return {std::move(t), detail::make_meta("tb", w, q)};
}

/// T_theta: phi_n -> (w_{n+1} / w_n)^{1/2} phi_{n+1}. No q appears.
inline TruncatedOperator creation_matrix(const WeightSequence& w, const QParam& q, std::size_t cutoff) {
  const auto dim = static_cast<Eigen::Index>(cutoff + 1);
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index n = 0; n + 1 < dim; ++n) t(n + 1, n) = std::sqrt(w.ratio(n + 1, n));
  auto meta = detail::make_meta("th", w, q);
  meta.exact = false;
  return {std::move(t), std::move(meta)};
}

/// (T_thetabar)*: phi_n -> conj(q)^{-(n+1)} (w_{n+1} / w_n)^{1/2} phi_{n+1}.
inline TruncatedOperator adjoint_annihilation_matrix(const WeightSequence& w, const QParam& q,
                                                     std::size_t cutoff) {
  const auto dim = static_cast<Eigen::Index>(cutoff + 1);
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(dim, dim);
  const QParam qc = q.conj();
  for (Eigen::Index n = 0; n + 1 < dim; ++n) t(n + 1, n) = qc.pow(-(n + 1)) * std::sqrt(w.ratio(n + 1, n));
  auto meta = detail::make_meta("(tb)*", w, q);
  meta.exact = false;
  return {std::move(t), std::move(meta)};
}

/// Number operator N phi_n = n phi_n.
inline TruncatedOperator number_matrix(std::size_t cutoff) {
  const auto dim = static_cast<Eigen::Index>(cutoff + 1);
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index n = 0; n < dim; ++n) t(n, n) = static_cast<double>(n);
  return {std::move(t), OperatorMeta{"N", "", {1.0, 0.0}, true}};
}

}  // namespace manin
