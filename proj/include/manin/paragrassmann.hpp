#pragma once

// The paragrassmann quotient PG_{l,q}: theta^l = thetabar^l = 0, w_n = 0 for n >= l.
//
// Convention: here the Toeplitz operator multiplies the symbol on the RIGHT,
// T_g phi = P(phi g), unlike toeplitz.hpp which multiplies on the left. With
// right multiplication no power of q survives in T_thetabar.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "manin/coherent.hpp"
#include "manin/errors.hpp"
#include "manin/toeplitz.hpp"
#include "manin/weights.hpp"

namespace manin {

struct ParagrassmannConfig {
  std::size_t l = 2;
  std::vector<double> weights;  // w_0..w_{l-1}
  QParam q{1.0};

  void validate() const {
    if (l < 2) throw ConfigError("paragrassmann order l must be at least 2");
    if (weights.size() != l)
      throw ConfigError("paragrassmann config needs exactly l = " + std::to_string(l) + " weights, got " +
                        std::to_string(weights.size()));
    for (double w : weights)
      if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("paragrassmann weights must be positive");
  }

  WeightSequence weight_sequence() const { return WeightSequence::explicit_table(weights); }
};

/// l x l matrix of T_thetabar: theta^j -> (w_j / w_{j-1})^{1/2} theta^{j-1}, 1 -> 0.
inline TruncatedOperator pg_annihilation(const ParagrassmannConfig& cfg) {
  cfg.validate();
  const auto l = static_cast<Eigen::Index>(cfg.l);
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(l, l);
  for (Eigen::Index j = 1; j < l; ++j)
    t(j - 1, j) = std::sqrt(cfg.weights[static_cast<std::size_t>(j)] / cfg.weights[static_cast<std::size_t>(j - 1)]);
  OperatorMeta meta{"tb (paragrassmann, right multiplication)", "explicit", cfg.q.value(), true};
  return {std::move(t), std::move(meta)};
}

struct PgStructureReport {
  std::size_t nilpotency_index = 0;  // smallest k with T^k == 0 exactly
  std::vector<cplx> eigenvalues;     // distinct values on the diagonal of the triangular matrix
  std::size_t eigenvector_count = 0; // dim ker T
  std::vector<cplx> phase_space;
  bool extreme = false;               // at most one point in the phase space
  double jordan_similarity_error = 0; // max |D^{-1} T D - J_l|
  std::vector<double> similarity_diagonal;
};

/// D = diag(d_j), d_0 = 1, d_j = d_{j-1} / T_{j-1,j}, so that D^{-1} T D = J_l.
inline Eigen::VectorXd pg_similarity_diagonal(const TruncatedOperator& t) {
  Eigen::VectorXd d(t.dim());
  d(0) = 1.0;
  for (Eigen::Index j = 1; j < t.dim(); ++j) d(j) = d(j - 1) / t(j - 1, j).real();
  return d;
}

/// Nilpotent Jordan block of size l (ones on the superdiagonal).
inline Eigen::MatrixXcd jordan_block(Eigen::Index l) {
  Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(l, l);
  for (Eigen::Index k = 1; k < l; ++k) j(k - 1, k) = 1.0;
  return j;
}

inline PgStructureReport pg_structure_report(const ParagrassmannConfig& cfg) {
  const auto t = pg_annihilation(cfg);
  const Eigen::MatrixXcd& m = t.entries();
  const Eigen::Index l = t.dim();
  PgStructureReport out;

  // Products of superdiagonal matrices only ever multiply and add exact zeros
  // off their band, so the zero test is exact.
  Eigen::MatrixXcd power = Eigen::MatrixXcd::Identity(l, l);
  for (Eigen::Index k = 1; k <= l; ++k) {
    power = power * m;
    if ((power.array() == cplx{}).all()) {
      out.nilpotency_index = static_cast<std::size_t>(k);
      break;
    }
  }

  for (Eigen::Index k = 0; k < l; ++k) {
    const cplx e = m(k, k);
    if (std::find(out.eigenvalues.begin(), out.eigenvalues.end(), e) == out.eigenvalues.end())
      out.eigenvalues.push_back(e);
  }
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(m);
  lu.setThreshold(1e-12);
  out.eigenvector_count = static_cast<std::size_t>(l - lu.rank());
  out.phase_space = out.eigenvalues;
  out.extreme = out.phase_space.size() <= 1;

  const Eigen::VectorXd d = pg_similarity_diagonal(t);
  out.similarity_diagonal.assign(d.data(), d.data() + d.size());
  const Eigen::MatrixXcd conj = d.cwiseInverse().asDiagonal() * m * d.asDiagonal();
  out.jordan_similarity_error = (conj - jordan_block(l)).cwiseAbs().maxCoeff();
  return out;
}

struct PgEigenCheck {
  cplx lambda;
  double residual;  // ||T v - lambda v|| / ||v||, the last row included
  bool eigenvector;
};

/// Applies the coherent-state construction (q = 1 coefficients, since no q enters
/// under right multiplication) to each candidate, truncated to the l-dimensional
/// space. The last row is a genuine residual here, not truncation leakage:
/// theta^l = 0, so only lambda = 0 survives.
inline std::vector<PgEigenCheck> pg_coherent_check(const ParagrassmannConfig& cfg, const std::vector<cplx>& candidates,
                                                   double tol = 1e-12) {
  const auto t = pg_annihilation(cfg);
  const auto w = cfg.weight_sequence();
  std::vector<PgEigenCheck> out;
  for (cplx lambda : candidates) {
    const auto state = coherent_coefficients_fixed(lambda, w, QParam(1.0), cfg.l - 1);
    const Eigen::VectorXcd v = state.scaled_vector(state.log_scale(), t.dim());
    const double r = (t.entries() * v - lambda * v).norm() / v.norm();
    out.push_back({lambda, r, r <= tol});
  }
  return out;
}

}  // namespace manin
