#include <gtest/gtest.h>

#include <sstream>

#include "manin/io.hpp"
#include "manin/parse.hpp"

using namespace manin;

TEST(Parse, ComplexNumbers) {
  EXPECT_EQ(parse::complex_number("2.5"), cplx(2.5, 0.0));
  EXPECT_EQ(parse::complex_number("-i"), cplx(0.0, -1.0));
  EXPECT_EQ(parse::complex_number("3i"), cplx(0.0, 3.0));
  EXPECT_EQ(parse::complex_number("(1+2i)"), cplx(1.0, 2.0));
  EXPECT_EQ(parse::complex_number("0.5-0.25i"), cplx(0.5, -0.25));
  EXPECT_EQ(parse::complex_number("1e-3+1e2i"), cplx(1e-3, 1e2));
  EXPECT_THROW(parse::complex_number("abc"), ConfigError);
  EXPECT_THROW(parse::complex_number("(1+2i"), ConfigError);
}

TEST(Parse, QValues) {
  EXPECT_EQ(parse::q_value("i").value(), cplx(0.0, 1.0));
  EXPECT_LE(std::abs(parse::q_value("polar:2,0.5").value() - std::polar(2.0, 0.5)), 1e-15);
  EXPECT_THROW(parse::q_value("0"), ConfigError);
}

TEST(Parse, Weights) {
  EXPECT_EQ(parse::weights("factorial").kind(), WeightKind::factorial);
  EXPECT_EQ(parse::weights("constant:3").scale(), 3.0);
  const auto pf = parse::weights("power-factorial:2,0.5");
  EXPECT_EQ(pf.exponent(), 2.0);
  EXPECT_NEAR(pf(3), 0.5 * 36.0, 1e-12);
  EXPECT_EQ(parse::weights("explicit:1,1,2").horizon().value(), 2u);  // largest valid index
  EXPECT_THROW(parse::weights("bogus"), ConfigError);
  EXPECT_THROW(parse::weights("power-factorial"), ConfigError);
}

TEST(Parse, ManinExpressions) {
  const QParam q(cplx{0.6, 0.3});
  const auto g = parse::manin("th tb - (0.5+1i) tb^2 + 3", q);
  EXPECT_EQ(g.coefficient({1, 1}), cplx(1.0));
  EXPECT_EQ(g.coefficient({0, 2}), cplx(-0.5, -1.0));
  EXPECT_EQ(g.coefficient({0, 0}), cplx(3.0));
  const auto swapped = parse::manin("tb th", q);
  EXPECT_LE(std::abs(swapped.coefficient({1, 1}) - 1.0 / q.value()), 1e-15);
  EXPECT_THROW(parse::manin("th x", q), ConfigError);
  EXPECT_THROW(parse::manin("", q), ConfigError);
}

TEST(Parse, Symbols) {
  const auto f = parse::symbol("L + 2 Lc^2 L - i");
  EXPECT_EQ(f.coefficients().at({1, 0}), cplx(1.0));
  EXPECT_EQ(f.coefficients().at({1, 2}), cplx(2.0));
  EXPECT_EQ(f.coefficients().at({0, 0}), cplx(0.0, -1.0));
  EXPECT_THROW(parse::symbol("th"), ConfigError);
}

TEST(Io, ManinRoundTrip) {
  const QParam q(cplx{0.3, -0.8});
  const auto g = parse::manin("2 th^3 tb + (1-1i) tb^4", q);
  const auto j = io::to_json(g);
  const auto back = io::manin_from_json(nlohmann::json::parse(j.dump()), q);
  EXPECT_EQ(io::to_json(back).dump(), j.dump());
  EXPECT_EQ(j[0].at("i"), 0);
  EXPECT_EQ(j[0].at("j"), 4);
}

TEST(Io, WeightsRoundTrip) {
  for (const auto& w : {WeightSequence::factorial(2.0), WeightSequence::constant(), WeightSequence::power_factorial(1.5, 0.3),
                        WeightSequence::explicit_table({1.0, 2.0, 0.1})}) {
    const auto j = io::to_json(w);
    const auto back = io::weights_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(io::to_json(back).dump(), j.dump());
    for (int n = 0; n < 3; ++n) EXPECT_EQ(back(n), w(n));
  }
}

TEST(Io, OperatorRoundTripIsBitExact) {
  const auto t = annihilation_matrix(WeightSequence::factorial(), QParam(std::polar(1.0, 0.1)), 6);
  const auto text = io::to_json(t).dump();
  const auto back = io::operator_from_json(nlohmann::json::parse(text));
  EXPECT_EQ(back.entries(), t.entries());
  EXPECT_EQ(io::to_json(back).dump(), text);
}

TEST(Io, NonFiniteAsStrings) {
  EXPECT_EQ(io::number(kInf), "inf");
  EXPECT_EQ(io::number(kNegInf), "-inf");
  EXPECT_EQ(io::read_number(io::number(kInf)), kInf);
  EXPECT_TRUE(std::isnan(io::read_number("nan")));
  EXPECT_THROW(io::read_number("foo"), ConfigError);
}

TEST(Io, DeterministicDump) {
  const auto r1 = io::to_json(radius_of_convergence(WeightSequence::constant(), QParam(1.0))).dump(2);
  const auto r2 = io::to_json(radius_of_convergence(WeightSequence::constant(), QParam(1.0))).dump(2);
  EXPECT_EQ(r1, r2);
  EXPECT_EQ(io::format(0.1), "0.1");
  EXPECT_EQ(io::format(1.0 / 3.0), "0.3333333333333333");
}

TEST(Io, CsvLayout) {
  std::ostringstream os;
  io::write_csv(os, number_matrix(1));
  EXPECT_EQ(os.str(), "\"0,0\",\"0,0\"\n\"0,0\",\"1,0\"\n");
  std::ostringstream g;
  io::write_grid_csv(g, {cplx{1.0, 2.0}}, {cplx{3.0, -4.0}});
  EXPECT_EQ(g.str(), "re_lambda,im_lambda,re,im\n1,2,3,-4\n");
}
