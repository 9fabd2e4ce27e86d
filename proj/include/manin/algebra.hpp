#pragma once

// Exact arithmetic in the Manin plane: normal-ordered monomials theta^i thetabar^j,
// the sesquilinear form on them and the projection P onto polynomials in theta.

#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <utility>

#include "manin/numeric.hpp"
#include "manin/weights.hpp"

namespace manin {

/// theta^i thetabar^j.
struct ManinMonomial {
  std::uint32_t i = 0;
  std::uint32_t j = 0;

  friend auto operator<=>(const ManinMonomial&, const ManinMonomial&) = default;
};

/// A finite combination of normal-ordered monomials.
///
/// The coefficient of each monomial is a finite sum  sum_e c_e q^e  kept as a
/// map from the integer exponent e to c_e. Powers of q are only applied when a
/// coefficient is evaluated, so exponents stay exact however large they grow.
/// Entries that cancel to exactly zero are pruned; nothing else is.
class ManinElement {
 public:
  using PowerSeries = std::map<std::int64_t, cplx>;
  using Terms = std::map<ManinMonomial, PowerSeries>;

  explicit ManinElement(QParam q) : q_(q) {}

  static ManinElement one(QParam q) { return monomial(q, 0, 0); }
  static ManinElement theta(QParam q) { return monomial(q, 1, 0); }
  static ManinElement theta_bar(QParam q) { return monomial(q, 0, 1); }
  static ManinElement monomial(QParam q, std::uint32_t i, std::uint32_t j, cplx c = 1.0,
                               std::int64_t q_exponent = 0) {
    ManinElement out(q);
    out.add({i, j}, c, q_exponent);
    return out;
  }

  /// Adds c q^e theta^i thetabar^j.
  ManinElement& add(ManinMonomial m, cplx c, std::int64_t q_exponent = 0) {
    if (c == cplx{0.0, 0.0}) return *this;
    auto& series = terms_[m];
    auto [it, inserted] = series.try_emplace(q_exponent, c);
    if (!inserted) {
      it->second += c;
      if (it->second == cplx{0.0, 0.0}) series.erase(it);
    }
    if (series.empty()) terms_.erase(m);
    return *this;
  }

  const QParam& q() const { return q_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Evaluated coefficient of theta^i thetabar^j.
  cplx coefficient(ManinMonomial m) const {
    auto it = terms_.find(m);
    if (it == terms_.end()) return {0.0, 0.0};
    return evaluate(it->second);
  }

  cplx evaluate(const PowerSeries& series) const {
    cplx sum{0.0, 0.0};
    for (const auto& [e, c] : series) sum += c * q_.pow(e);
    return sum;
  }

  friend ManinElement operator+(ManinElement a, const ManinElement& b) {
    require_same_q(a, b);
    for (const auto& [m, series] : b.terms_)
      for (const auto& [e, c] : series) a.add(m, c, e);
    return a;
  }

  friend ManinElement operator*(cplx s, ManinElement a) {
    ManinElement out(a.q_);
    for (const auto& [m, series] : a.terms_)
      for (const auto& [e, c] : series) out.add(m, s * c, e);
    return out;
  }

  /// Structural equality: same monomials with the same (exponent, coefficient) pairs.
  friend bool operator==(const ManinElement& a, const ManinElement& b) {
    return a.q_ == b.q_ && a.terms_ == b.terms_;
  }

  static void require_same_q(const ManinElement& a, const ManinElement& b) {
    if (!(a.q_ == b.q_)) throw ConfigError("Manin elements over different q cannot be combined");
  }

 private:
  QParam q_;
  Terms terms_;
};

/// The algebra product in normal order:
/// theta^i thetabar^j * theta^k thetabar^l = q^{-jk} theta^{i+k} thetabar^{j+l}.
inline ManinElement normal_order_product(const ManinElement& a, const ManinElement& b) {
  ManinElement::require_same_q(a, b);
  ManinElement out(a.q());
  for (const auto& [ma, sa] : a.terms()) {
    for (const auto& [mb, sb] : b.terms()) {
      std::uint32_t i = 0, j = 0;
      if (__builtin_add_overflow(ma.i, mb.i, &i) || __builtin_add_overflow(ma.j, mb.j, &j))
        throw InputTooLarge("monomial degree overflows");
      const std::int64_t swap = detail::checked_mul(ma.j, mb.i);
      for (const auto& [ea, ca] : sa)
        for (const auto& [eb, cb] : sb)
          out.add({i, j}, ca * cb, detail::checked_add(detail::checked_add(ea, eb), -swap));
    }
  }
  return out;
}

inline ManinElement operator*(const ManinElement& a, const ManinElement& b) {
  return normal_order_product(a, b);
}

/// <a, b> with <theta^i thetabar^j, theta^k thetabar^l> = w_{i+l} delta_{i-j, k-l};
/// antilinear in a, linear in b.
inline cplx sesquilinear_form(const ManinElement& a, const ManinElement& b, const WeightSequence& w) {
  cplx sum{0.0, 0.0};
  for (const auto& [ma, sa] : a.terms()) {
    const cplx ca = std::conj(a.evaluate(sa));
    const std::int64_t deg_a = std::int64_t{ma.i} - ma.j;
    for (const auto& [mb, sb] : b.terms()) {
      if (std::int64_t{mb.i} - mb.j != deg_a) continue;
      sum += ca * b.evaluate(sb) * w(std::int64_t{ma.i} + mb.j);
    }
  }
  return sum;
}

/// P(theta^i thetabar^j) = (w_i / w_{i-j}) theta^{i-j} for i >= j, zero otherwise.
inline ManinElement project_P(const ManinElement& a, const WeightSequence& w) {
  ManinElement out(a.q());
  for (const auto& [m, series] : a.terms()) {
    if (m.i < m.j) continue;
    const double r = w.ratio(m.i, m.i - m.j);
    for (const auto& [e, c] : series) out.add({m.i - m.j, 0}, c * r, e);
  }
  return out;
}

}  // namespace manin
