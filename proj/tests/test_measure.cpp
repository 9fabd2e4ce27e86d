#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "manin/measure.hpp"
#include "manin/testing/oracles.hpp"

using namespace manin;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(ClosedForm, FactorialUnitCircle) {
  const auto d = closed_form_density(WeightSequence::factorial(), QParam(std::polar(1.0, 1.0)));
  ASSERT_TRUE(d.has_value());
  EXPECT_NEAR(d->of_t(0.0), 1.0 / kPi, 1e-15);
  EXPECT_NEAR(d->of_t(2.0), std::exp(-2.0) / kPi, 1e-15);
  EXPECT_EQ(d->support_end, kInf);
  const auto rep = verify_density_moments(*d, WeightSequence::factorial(), QParam(1.0), 20, 1e-9);
  EXPECT_TRUE(rep.passed) << rep.max_deviation;
}

TEST(ClosedForm, AbsentOutsideTable) {
  EXPECT_FALSE(closed_form_density(WeightSequence::constant(), QParam(1.0)).has_value());
  EXPECT_FALSE(closed_form_density(WeightSequence::factorial(), QParam(0.5)).has_value());
  EXPECT_FALSE(closed_form_density(WeightSequence::explicit_table({1.0, 2.3, 0.7, 5.0}), QParam(1.0)).has_value());
}

TEST(Moments, FactorialOrderFiveIsGaussLaguerre) {
  const auto quad = gauss_quadrature_for(WeightSequence::factorial(), QParam(1.0), 5);
  const auto [nodes, weights] = oracle::gauss_laguerre(5);
  ASSERT_EQ(quad.nodes.size(), 5u);
  EXPECT_EQ(quad.provenance, QuadratureProvenance::moment_solved);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(quad.nodes[i], nodes[i], 1e-9 * nodes[i]);
    EXPECT_NEAR(quad.masses[i], weights[i] / kPi, 1e-9 * weights[i] / kPi);
  }
  const auto cf = closed_form_quadrature(*closed_form_density(WeightSequence::factorial(), QParam(1.0)), 5);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(cf.nodes[i], nodes[i], 1e-12 * nodes[i]);
}

TEST(Moments, OrderOne) {
  const auto m = radial_moments(WeightSequence::power_factorial(1.5, 2.0), QParam(0.8), 2);
  const auto quad = gauss_quadrature_from_moments(m, 1);
  ASSERT_EQ(quad.nodes.size(), 1u);
  EXPECT_NEAR(quad.nodes[0], m.values[1] / m.values[0], 1e-14 * quad.nodes[0]);
  EXPECT_NEAR(quad.masses[0], m.values[0], 1e-15);
}

TEST(Moments, ConstantWeightsGiveUnitAtom) {
  for (std::size_t order : {1u, 3u, 8u, 20u}) {
    const auto quad = gauss_quadrature_for(WeightSequence::constant(), QParam(1.0), order);
    ASSERT_EQ(quad.nodes.size(), 1u) << order;
    EXPECT_NEAR(quad.nodes[0], 1.0, 1e-12);
    EXPECT_NEAR(quad.masses[0], 1.0 / kPi, 1e-14);
    for (std::size_t j = 0; j < 2 * order; ++j)
      EXPECT_NEAR(quad.masses[0] * std::pow(quad.nodes[0], static_cast<double>(j)), 1.0 / kPi, 1e-11);
  }
}

TEST(Moments, ExactnessAndPositivity) {
  struct Case {
    WeightSequence w;
    QParam q;
    std::size_t order;
  };
  const std::vector<Case> cases{{WeightSequence::factorial(), QParam(1.0), 12},
                                {WeightSequence::factorial(2.0), QParam(0.9), 8},
                                {WeightSequence::power_factorial(2.0), QParam(0.7), 6},
                                {WeightSequence::power_factorial(0.5), QParam(1.0), 10}};
  for (const auto& c : cases) {
    const auto quad = gauss_quadrature_for(c.w, c.q, c.order);
    const auto m = radial_moments(c.w, c.q, 2 * c.order);
    for (double x : quad.masses) EXPECT_GT(x, 0.0);
    for (std::size_t j = 0; j < 2 * c.order; ++j) {
      long double s = 0;
      for (std::size_t i = 0; i < quad.nodes.size(); ++i)
        s += quad.masses[i] * std::pow(static_cast<long double>(quad.nodes[i]), static_cast<long double>(j));
      EXPECT_NEAR(static_cast<double>(s / m.values[j]), 1.0, 1e-8) << c.w.describe() << " j=" << j;
    }
  }
}

TEST(Moments, IndefiniteSequenceRejected) {
  // m_0 m_2 < m_1^2 cannot come from a positive measure
  MomentSequence m{{1.0, 2.0, 1.0, 1.0}, 2.0};
  EXPECT_THROW(gauss_quadrature_from_moments(m, 2), NoPositiveMeasure);
  MomentSequence neg{{1.0, -1.0}, 1.0};
  EXPECT_THROW(gauss_quadrature_from_moments(neg, 1), NoPositiveMeasure);
}

TEST(Moments, FactorialOrderTwentyTooHigh) {
  try {
    gauss_quadrature_for(WeightSequence::factorial(), QParam(1.0), 20);
    FAIL() << "expected OrderTooHigh";
  } catch (const OrderTooHigh& e) {
    EXPECT_GE(e.largest_order(), 12u);
    EXPECT_LT(e.largest_order(), 20u);
  }
}

TEST(Moments, ClampedOrderFallsBackWithWarning) {
  const auto quad = gauss_quadrature_for(WeightSequence::factorial(), QParam(1.0), 40);
  EXPECT_LT(quad.order, 20u);
  EXPECT_FALSE(quad.warnings.empty());
}

TEST(VerifyMoments, NormalizationAndCorruption) {
  const auto w = WeightSequence::factorial();
  auto quad = gauss_quadrature_for(w, QParam(1.0), 10);
  const auto good = verify_moments(quad, w, QParam(1.0), 19, 1e-8);
  EXPECT_TRUE(good.passed) << good.max_deviation;
  EXPECT_NEAR(normalization_term(quad, w, QParam(1.0), 0), 1.0, 1e-12);
  quad.masses[3] *= 1.01;
  const auto bad = verify_moments(quad, w, QParam(1.0), 19, 1e-8);
  EXPECT_FALSE(bad.passed);
  EXPECT_GT(bad.max_deviation, 1e-4);
  EXPECT_LT(bad.max_deviation, 0.1);
  // n = 0 sees exactly the corrupted mass share
  EXPECT_NEAR(bad.deviations[0], 0.01 * kPi * quad.masses[3] / 1.01, 1e-12);
}

TEST(VerifyMoments, TotalMassOverWeightIsProbability) {
  for (const auto& w : {WeightSequence::factorial(3.0), WeightSequence::constant(2.0)}) {
    const auto quad = radial_quadrature(w, QParam(1.0), 4);
    EXPECT_NEAR(normalization_term(quad, w, QParam(1.0), 0), 1.0, 1e-12);
  }
}

TEST(Resolution, GramFactorial) {
  const auto w = WeightSequence::factorial();
  const auto quad = gauss_quadrature_for(w, QParam(1.0), 12);
  const auto rep = verify_resolution_identity(quad, w, QParam(1.0), 10, {25, 0.0}, 1e-8);
  EXPECT_TRUE(rep.passed) << rep.max_deviation;
  EXPECT_NEAR(rep.gram(0, 0).real(), 1.0, 1e-12);
  for (Eigen::Index j = 0; j <= 10; ++j)
    for (Eigen::Index k = 0; k <= 10; ++k)
      if (j != k) {
        EXPECT_LE(std::abs(rep.gram(j, k)), 1e-13);
      }
}

TEST(Resolution, OffsetInvariance) {
  const auto w = WeightSequence::power_factorial(1.0, 1.0);
  const QParam q(std::polar(0.9, 0.4));
  const auto quad = gauss_quadrature_for(w, q, 8);
  const auto base = verify_resolution_identity(quad, w, q, 6, {13, 0.0}, 1e-8);
  EXPECT_TRUE(base.passed) << base.max_deviation;
  for (double off : {0.1, 1.7, -3.0}) {
    const auto r = verify_resolution_identity(quad, w, q, 6, {13, off}, 1e-8);
    EXPECT_NEAR(r.max_deviation, base.max_deviation, 1e-12);
  }
}

TEST(Resolution, TooFewAngles) {
  const auto w = WeightSequence::factorial();
  const auto quad = gauss_quadrature_for(w, QParam(1.0), 12);
  EXPECT_THROW(verify_resolution_identity(quad, w, QParam(1.0), 10, {20, 0.0}, 1e-8), InsufficientQuadrature);
}

TEST(Divergence, PartialSumsGrowLinearly) {
  const auto w = WeightSequence::factorial();
  const auto quad = closed_form_quadrature(*closed_form_density(w, QParam(1.0)), 12);
  const auto d = norm_divergence_witness(quad, w, QParam(1.0), 20);
  EXPECT_NEAR(d.partial_sums[0], 1.0, 1e-12);
  EXPECT_NEAR(d.partial_sums[9], 10.0, 1e-9);
  EXPECT_NEAR(d.slope, 1.0, 1e-6);
}
