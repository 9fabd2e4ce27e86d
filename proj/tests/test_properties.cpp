// Randomized invariants with fixed seeds.

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "manin/algebra.hpp"
#include "manin/coherent.hpp"
#include "manin/radius.hpp"
#include "manin/testing/oracles.hpp"

using namespace manin;

namespace {

QParam annulus_q(oracle::Rng& rng) {
  return QParam(std::polar(rng.uniform(0.5, 2.0), rng.uniform(0.0, 2.0 * std::numbers::pi)));
}

ManinElement random_element(oracle::Rng& rng, const QParam& q, int terms, std::uint32_t max_exp) {
  ManinElement g(q);
  for (int t = 0; t < terms; ++t)
    g.add({rng.integer(0, max_exp), rng.integer(0, max_exp)}, rng.complex_box(1.0), static_cast<std::int64_t>(rng.integer(0, 4)) - 2);
  return g;
}

// Evaluated coefficients per monomial, for comparisons that do not care how q powers are grouped.
std::map<ManinMonomial, cplx> evaluated(const ManinElement& g) {
  std::map<ManinMonomial, cplx> out;
  for (const auto& [m, s] : g.terms()) out[m] = g.evaluate(s);
  return out;
}

void expect_same(const ManinElement& a, const ManinElement& b, double tol) {
  auto ea = evaluated(a), eb = evaluated(b);
  for (const auto& [m, c] : eb) ea.try_emplace(m, cplx{});
  for (const auto& [m, c] : ea) {
    const cplx d = eb.count(m) ? eb[m] : cplx{};
    EXPECT_LE(std::abs(c - d), tol * std::max(1.0, std::abs(d))) << m.i << "," << m.j;
  }
}

}  // namespace

TEST(AlgebraProperties, NormalOrderMatchesSwapOracle) {
  oracle::Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const QParam q = annulus_q(rng);
    const auto a = ManinElement::monomial(q, rng.integer(0, 8), rng.integer(0, 8), rng.complex_box(1.0));
    const auto b = ManinElement::monomial(q, rng.integer(0, 8), rng.integer(0, 8), rng.complex_box(1.0));
    const auto got = oracle::dense(a * b);
    const auto want = oracle::product_by_swaps(oracle::dense(a), oracle::dense(b));
    ASSERT_EQ(got.size(), want.size());
    for (const auto& [k, c] : want) {
      ASSERT_TRUE(got.count(k)) << "exponent mismatch";
      EXPECT_LE(std::abs(got.at(k) - c), 1e-12 * std::abs(c));
    }
  }
}

TEST(AlgebraProperties, Associativity) {
  oracle::Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const QParam q = annulus_q(rng);
    const auto a = random_element(rng, q, 3, 4), b = random_element(rng, q, 3, 4), c = random_element(rng, q, 3, 4);
    // same monomials and q exponents on both sides; coefficients agree to rounding
    const auto l = oracle::dense((a * b) * c), r = oracle::dense(a * (b * c));
    ASSERT_EQ(l.size(), r.size());
    for (auto it = l.begin(), jt = r.begin(); it != l.end(); ++it, ++jt) {
      EXPECT_EQ(it->first, jt->first);
      EXPECT_LE(std::abs(it->second - jt->second), 1e-12 * std::abs(jt->second));
    }
    expect_same((a * b) * c, a * (b * c), 1e-12);
  }
}

TEST(AlgebraProperties, Sesquilinearity) {
  oracle::Rng rng(3);
  const auto w = WeightSequence::power_factorial(1.2, 0.9);
  for (int trial = 0; trial < 100; ++trial) {
    const QParam q = annulus_q(rng);
    const auto a = random_element(rng, q, 3, 4), b = random_element(rng, q, 3, 4), c = random_element(rng, q, 3, 4);
    const cplx s = rng.complex_box(2.0);
    auto near = [](cplx x, cplx y) { return std::abs(x - y) <= 1e-11 * std::max({1.0, std::abs(x), std::abs(y)}); };
    EXPECT_TRUE(near(sesquilinear_form(a + b, c, w), sesquilinear_form(a, c, w) + sesquilinear_form(b, c, w)));
    EXPECT_TRUE(near(sesquilinear_form(a, b + c, w), sesquilinear_form(a, b, w) + sesquilinear_form(a, c, w)));
    EXPECT_TRUE(near(sesquilinear_form(s * a, b, w), std::conj(s) * sesquilinear_form(a, b, w)));
    EXPECT_TRUE(near(sesquilinear_form(a, s * b, w), s * sesquilinear_form(a, b, w)));
  }
}

TEST(AlgebraProperties, ProjectionIdempotent) {
  oracle::Rng rng(4);
  const auto w = WeightSequence::factorial(1.5);
  for (int trial = 0; trial < 100; ++trial) {
    const QParam q = annulus_q(rng);
    const auto x = random_element(rng, q, 4, 6);
    const auto p = project_P(x, w);
    expect_same(project_P(p, w), p, 1e-13);
    for (const auto& [m, s] : p.terms()) EXPECT_EQ(m.j, 0u);
  }
}

TEST(CoherentProperties, ClosedFormMatchesRecursion) {
  oracle::Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const QParam q(std::polar(rng.uniform(0.6, 1.0), rng.uniform(0.0, 2.0 * std::numbers::pi)));
    const auto w = trial % 2 ? WeightSequence::factorial(rng.uniform(0.5, 3.0))
                             : WeightSequence::power_factorial(rng.uniform(1.0, 2.0), rng.uniform(0.5, 3.0));
    const cplx lam = rng.in_disk(2.0);
    const auto rec = oracle::coherent_by_recursion(lam, w, q.value(), 30);
    for (std::size_t n = 0; n < rec.size(); ++n) {
      const cplx want(static_cast<double>(rec[n].real()), static_cast<double>(rec[n].imag()));
      const cplx got = coherent_coefficient(lam, static_cast<std::int64_t>(n), w, q).value();
      EXPECT_LE(std::abs(got - want), 1e-12 * std::abs(want)) << trial << " n=" << n;
    }
  }
}

TEST(CoherentProperties, DistinctStatesNotParallel) {
  oracle::Rng rng(6);
  const auto w = WeightSequence::factorial();
  for (int trial = 0; trial < 30; ++trial) {
    const QParam q(std::polar(1.0, rng.uniform(0.0, 6.0)));
    const cplx mu = rng.in_disk(1.5), lam = rng.in_disk(1.5);
    if (std::abs(mu - lam) < 0.05) continue;
    const double lhs = std::norm(kernel(mu, lam, w, q));
    const double rhs = coherent_norm_sq(mu, w, q) * coherent_norm_sq(lam, w, q);
    EXPECT_GT(rhs - lhs, 1e-10 * rhs);
  }
}

TEST(CoherentProperties, EvolutionPreservesNorm) {
  oracle::Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const QParam q(std::polar(rng.uniform(0.7, 1.0), rng.uniform(0.0, 6.0)));
    const auto w = WeightSequence::factorial();
    const auto s = coherent_coefficients(rng.in_disk(2.0), w, q);
    const auto e = evolve_state(s, rng.uniform(-10.0, 10.0));
    double direct = 0.0;
    for (std::size_t n = 0; n <= e.cutoff(); ++n) direct += std::norm(e.coefficient(n));
    EXPECT_NEAR(std::sqrt(direct), std::sqrt(s.norm_sq()), 1e-12 * std::sqrt(s.norm_sq()));
  }
}

TEST(CoherentProperties, ResidualBoundedByTail) {
  oracle::Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const QParam q(std::polar(rng.uniform(0.8, 1.0), rng.uniform(0.0, 6.0)));
    const auto w = WeightSequence::factorial(rng.uniform(0.5, 2.0));
    const auto s = coherent_coefficients(rng.in_disk(3.0), w, q, 1e-14);
    const auto r = eigen_residual(s, w, q);
    EXPECT_LE(r.residual, 1e-12);
    EXPECT_LE(r.leakage, r.edge_bound * (1.0 + 1e-9) + 1e-300);
  }
}
