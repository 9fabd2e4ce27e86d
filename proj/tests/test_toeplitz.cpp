#include <gtest/gtest.h>

#include <cmath>

#include "manin/boundedness.hpp"
#include "manin/coherent.hpp"
#include "manin/testing/oracles.hpp"
#include "manin/toeplitz.hpp"

using namespace manin;

namespace {

double max_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Toeplitz, AnnihilationFactorialEntries) {
  const QParam q(cplx{0.8, 0.6});
  const auto w = WeightSequence::factorial();
  const auto t = toeplitz_matrix(ManinElement::theta_bar(q), w, 8);
  for (int n = 1; n <= 8; ++n) {
    const cplx want = std::pow(q.value(), -n) * std::sqrt(static_cast<double>(n));
    EXPECT_LE(std::abs(t(n - 1, n) - want), 1e-13);
  }
  EXPECT_LE(max_diff(t.entries(), annihilation_matrix(w, q, 8).entries()), 1e-14);
}

TEST(Toeplitz, UnitSymbolIsIdentity) {
  const auto t = toeplitz_matrix(ManinElement::one(QParam(2.0)), WeightSequence::factorial(), 6);
  EXPECT_EQ(t.entries(), Eigen::MatrixXcd::Identity(7, 7));
  EXPECT_TRUE(t.exact());
}

TEST(Toeplitz, ThetaThetaBarDiagonal) {
  const QParam q(cplx{1.2, -0.3});
  const auto w = WeightSequence::power_factorial(1.3, 2.0);
  const auto t = toeplitz_matrix(ManinElement::monomial(q, 1, 1), w, 10);
  for (int n = 0; n <= 10; ++n) {
    const cplx want = std::pow(q.value(), -n) * w(n + 1) / w(n);
    EXPECT_LE(std::abs(t(n, n) - want), 1e-12 * std::abs(want));
    EXPECT_LE(std::abs(t(n, n) - oracle::toeplitz_entry(ManinElement::monomial(q, 1, 1), w, n, n)), 1e-12 * std::abs(want));
  }
}

TEST(Toeplitz, AnnihilationSuperdiagonal) {
  const auto t = annihilation_matrix(WeightSequence::factorial(), QParam(1.0), 3);
  EXPECT_NEAR(t(0, 1).real(), 1.0, 1e-15);
  EXPECT_NEAR(t(1, 2).real(), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(t(2, 3).real(), std::sqrt(3.0), 1e-15);
}

TEST(Toeplitz, NumberMatrix) {
  const auto n = number_matrix(2);
  Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(3, 3);
  want(1, 1) = 1.0;
  want(2, 2) = 2.0;
  EXPECT_EQ(n.entries(), want);
}

TEST(Toeplitz, AdjointIsConjugateTranspose) {
  for (cplx qv : {cplx{1.0, 0.0}, cplx{2.0, 0.0}, cplx{0.6, 0.9}, cplx{0.0, 1.0}}) {
    const QParam q(qv);
    for (const auto& w : {WeightSequence::factorial(), WeightSequence::constant(3.0), WeightSequence::power_factorial(2.0)}) {
      const auto a = annihilation_matrix(w, q, 9);
      const auto b = adjoint_annihilation_matrix(w, q, 9);
      EXPECT_LE(max_diff(b.entries(), a.entries().adjoint()), 1e-13) << qv;
      EXPECT_LE(max_diff(a.adjoint().entries(), b.entries()), 1e-13);
    }
  }
}

TEST(Toeplitz, CreationVersusAdjoint) {
  const auto w = WeightSequence::factorial();
  EXPECT_GT(max_diff(creation_matrix(w, QParam(2.0), 6).entries(), adjoint_annihilation_matrix(w, QParam(2.0), 6).entries()),
            1e-3);
  EXPECT_LE(max_diff(creation_matrix(w, QParam(1.0), 6).entries(), adjoint_annihilation_matrix(w, QParam(1.0), 6).entries()),
            1e-15);
}

TEST(Toeplitz, RaisingSymbolsClearExactness) {
  const QParam q(1.0);
  EXPECT_TRUE(toeplitz_matrix(ManinElement::theta_bar(q), WeightSequence::factorial(), 5).exact());
  EXPECT_FALSE(toeplitz_matrix(ManinElement::theta(q), WeightSequence::factorial(), 5).exact());
}

TEST(Toeplitz, OracleEquivalenceAllSmallMonomials) {
  const QParam q(cplx{0.9, 0.5});
  const auto w = WeightSequence::power_factorial(0.8, 1.7);
  for (std::uint32_t i = 0; i <= 4; ++i)
    for (std::uint32_t j = 0; j <= 4; ++j) {
      const auto g = ManinElement::monomial(q, i, j);
      const auto t = toeplitz_matrix(g, w, 12);
      for (std::uint32_t n = 0; n <= 12; ++n)
        for (std::uint32_t m = 0; m <= 12; ++m) {
          const cplx want = oracle::toeplitz_entry(g, w, m, n);
          EXPECT_LE(std::abs(t(m, n) - want), 1e-12 * std::max(1.0, std::abs(want))) << i << j << m << n;
          if (static_cast<int>(m) - static_cast<int>(n) != static_cast<int>(i) - static_cast<int>(j)) {
            EXPECT_EQ(t(m, n), cplx{}) << "band " << i << j << m << n;
          }
        }
    }
}

TEST(Toeplitz, Linearity) {
  const QParam q(cplx{1.1, 0.2});
  const auto w = WeightSequence::factorial(2.0);
  const cplx alpha{0.4, -2.0};
  const auto g = ManinElement::monomial(q, 2, 1) + ManinElement::monomial(q, 0, 1, {0.0, 1.0});
  const auto h = ManinElement::monomial(q, 1, 1, 3.0) + ManinElement::monomial(q, 0, 3);
  const Eigen::MatrixXcd lhs = toeplitz_matrix(alpha * g + h, w, 10).entries();
  const Eigen::MatrixXcd rhs = alpha * toeplitz_matrix(g, w, 10).entries() + toeplitz_matrix(h, w, 10).entries();
  EXPECT_LE(max_diff(lhs, rhs), 1e-12 * rhs.cwiseAbs().maxCoeff());
}

TEST(Boundedness, ConstantWeightsUnitQ) {
  const auto r = boundedness_report(WeightSequence::constant(), QParam(1.0));
  EXPECT_EQ(r.bounded, Tristate::yes);
  EXPECT_EQ(r.compact, Tristate::no);
  EXPECT_NEAR(r.sup_estimate, 1.0, 1e-12);
}

TEST(Boundedness, FactorialUnitCircleUnbounded) {
  EXPECT_EQ(boundedness_report(WeightSequence::factorial(), QParam(1.0)).bounded, Tristate::no);
  EXPECT_EQ(boundedness_report(WeightSequence::factorial(), QParam(std::polar(1.0, 0.7))).bounded, Tristate::no);
}

TEST(Boundedness, FactorialAbsQTwoCompact) {
  const auto r = boundedness_report(WeightSequence::factorial(), QParam(2.0), 200);
  EXPECT_EQ(r.compact, Tristate::yes);
  EXPECT_EQ(r.bounded, Tristate::yes);
  ASSERT_EQ(r.ratio_sequence.size(), 200u);
  EXPECT_NEAR(r.ratio_sequence[2], 3.0 / 64.0, 1e-15);
}

TEST(Domain, FiniteVector) {
  const auto r = domain_membership(std::vector<cplx>{1.0, 2.0, {0.0, 3.0}}, WeightSequence::factorial(), QParam(1.0));
  EXPECT_EQ(r.verdict, DomainVerdict::in_domain);
}

TEST(Domain, CoherentCoefficientsInside) {
  const auto w = WeightSequence::constant();
  const QParam q(1.0);
  const double lam = 0.6;
  CoefficientFamily fam{"coherent", [&](std::size_t n) { return coherent_coefficient(lam, static_cast<std::int64_t>(n), w, q).log_abs; }};
  EXPECT_EQ(domain_membership(fam, w, q).verdict, DomainVerdict::in_domain);
  const auto wf = WeightSequence::factorial();
  CoefficientFamily fam2{"coherent", [&](std::size_t n) { return coherent_coefficient(2.5, static_cast<std::int64_t>(n), wf, q).log_abs; }};
  EXPECT_EQ(domain_membership(fam2, wf, q).verdict, DomainVerdict::in_domain);
}

TEST(Domain, HarmonicFamilyNotInDomain) {
  CoefficientFamily fam{"1/(n+1)", [](std::size_t n) { return -std::log(static_cast<double>(n) + 1.0); }};
  EXPECT_EQ(domain_membership(fam, WeightSequence::factorial(), QParam(1.0)).verdict, DomainVerdict::not_in_domain);
  // the harmonic oracle: the terms n/(n+1)^2 stay above 1/(4n)
  double partial = 0.0, harmonic = 0.0;
  for (int n = 1; n <= 1000; ++n) {
    partial += n / ((n + 1.0) * (n + 1.0));
    harmonic += 1.0 / n;
  }
  EXPECT_GT(partial, harmonic / 4.0);
}
