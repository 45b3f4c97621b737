#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oiss/csv.hpp"
#include "oiss/error.hpp"
#include "oiss/grid.hpp"
#include "oiss/piecewise.hpp"
#include "oiss/young.hpp"
#include "oracles.hpp"

using namespace oiss;

namespace {

// x on [0, 2), zero after.
PiecewiseFn ramp() { return PiecewiseFn({0.0, 2.0}, {Cubic{{0.0, 1.0, 0.0, 0.0}}}); }

// Smooth-ish cubic sample with a sign change and a gap.
PiecewiseFn wiggle() {
  return PiecewiseFn({0.5, 1.5, 3.0, 4.0, 6.0},
                     {Cubic{{1.0, -2.0, 0.5, 0.3}}, Cubic{{-0.7, 0.2, 0.0, -0.1}}, Cubic{}, Cubic{{0.2, 0.1, -0.3, 0.05}}});
}

PiecewiseFn three_blocks() { return PiecewiseFn::step({0.0, 2.0, 6.0, 14.0}, {0.5, 0.25, 0.125}); }

}  // namespace

TEST(Cubic, ShiftDilateReflect) {
  const Cubic p{{1.0, -2.0, 0.5, 0.3}};
  for (double y : {-1.0, 0.0, 0.3, 2.0}) {
    EXPECT_NEAR(p.shifted(0.7)(y), p(y + 0.7), 1e-14);
    EXPECT_NEAR(p.dilated(2.5)(y), p(2.5 * y), 1e-13);
    EXPECT_NEAR(p.reflected()(y), p(-y), 1e-14);
  }
  EXPECT_EQ(p.degree(), 3);
  EXPECT_EQ(Cubic{}.degree(), -1);
  EXPECT_NEAR(p.antiderivative(1.0), 1.0 - 1.0 + 0.5 / 3.0 + 0.3 / 4.0, 1e-15);
}

TEST(Piecewise, ConstructionValidates) {
  EXPECT_THROW(PiecewiseFn({1.0, 0.5}, {Cubic{}}), DomainError);
  EXPECT_THROW(PiecewiseFn({-1.0, 0.5}, {Cubic{}}), DomainError);
  EXPECT_THROW(PiecewiseFn({0.0, 1.0}, {}), DomainError);
}

TEST(Piecewise, EvaluationIsLeftClosedRightOpen) {
  const auto f = PiecewiseFn::indicator(1.0, 2.0, 3.0);
  EXPECT_EQ(f(0.999), 0.0);
  EXPECT_EQ(f(1.0), 3.0);
  EXPECT_EQ(f(1.999), 3.0);
  EXPECT_EQ(f(2.0), 0.0);
}

TEST(Piecewise, IntegrateExamples) {
  EXPECT_EQ(integrate(PiecewiseFn::indicator(0.0, 1.0), 0.0, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(integrate(ramp(), 0.0, 2.0), 2.0);
  EXPECT_DOUBLE_EQ(integrate(three_blocks(), 0.0), 3.0);
  EXPECT_THROW(integrate(PiecewiseFn::constant(1.0), 0.0), DivergentIntegralError);
  EXPECT_DOUBLE_EQ(integrate(PiecewiseFn::constant(2.0), 1.0, 4.0), 6.0);
}

TEST(Piecewise, IntegrateMatchesSimpson) {
  const auto f = wiggle();
  for (auto [a, b] : {std::pair{0.0, 6.0}, {0.7, 3.3}, {1.5, 5.9}}) {
    EXPECT_NEAR(integrate(f, a, b), oracle::piecewise_simpson(f, a, b), 1e-10);
    EXPECT_NEAR(integrate_abs(f, a, b), oracle::piecewise_simpson(f, a, b, [](double v) { return std::abs(v); }, 4000),
                1e-8);
  }
}

TEST(Piecewise, Additivity) {
  const auto f = wiggle();
  for (double b : {0.2, 1.0, 2.2, 4.5}) {
    const double whole = integrate(f, 0.1, 5.5);
    const double split = integrate(f, 0.1, b) + integrate(f, b, 5.5);
    EXPECT_NEAR(split, whole, 1e-13 * std::max(1.0, std::abs(whole)));
  }
}

TEST(Piecewise, ShiftLeftExamples) {
  const auto chi = PiecewiseFn::indicator(0.0, 1.0);
  const auto shifted = shift_left(chi, 0.5);
  EXPECT_EQ(shifted(0.0), 1.0);
  EXPECT_EQ(shifted(0.49), 1.0);
  EXPECT_EQ(shifted(0.5), 0.0);
  EXPECT_DOUBLE_EQ(integrate(shifted, 0.0), 0.5);
  const auto same = shift_left(wiggle(), 0.0);
  EXPECT_EQ(same.breakpoints(), wiggle().breakpoints());
  EXPECT_TRUE(shift_left(PiecewiseFn::indicator(2.0, 6.0, 0.25), 10.0).is_zero());
}

TEST(Piecewise, ShiftSemigroupLaw) {
  const auto f = wiggle();
  const auto probe = lin_grid(0.0, 7.0, 1000);
  for (auto [s, t] : {std::pair{0.3, 0.9}, {1.0, 2.5}, {0.0, 4.0}}) {
    const auto a = shift_left(shift_left(f, s), t);
    const auto b = shift_left(f, s + t);
    for (double x : probe) EXPECT_NEAR(a(x), b(x), 1e-12) << s << ' ' << t << ' ' << x;
  }
}

TEST(Piecewise, ShiftContraction) {
  const auto f = wiggle();
  const double full = integrate_abs(f, 0.0);
  EXPECT_DOUBLE_EQ(integrate_abs(shift_left(f, 0.4), 0.0), full);  // f vanishes on [0, 0.5)
  EXPECT_LT(integrate_abs(shift_left(f, 0.8), 0.0), full);
}

TEST(Piecewise, ShiftDifference) {
  const auto f = wiggle();
  const auto d = shift_difference(f, 0.3, 1.1);
  for (double x : lin_grid(0.0, 7.0, 701)) EXPECT_NEAR(d(x), f(x + 0.3) - f(x + 1.1), 1e-12) << x;
  EXPECT_TRUE(shift_difference(f, 0.5, 0.5).is_zero());
  EXPECT_THROW(shift_difference(f, 1.0, 0.5), DomainError);
}

TEST(Piecewise, ComposeYoung) {
  const auto phi = YoungFunction::power(2);
  const auto sq = compose_young(phi, PiecewiseFn::indicator(0.0, 1.0, 2.0));
  EXPECT_EQ(sq(0.5), 4.0);
  EXPECT_TRUE(compose_young(phi, PiecewiseFn{}).is_zero());
  EXPECT_DOUBLE_EQ(integrate(compose_young(phi, three_blocks()), 0.0), 7.0 / 8.0);
  EXPECT_THROW(compose_young(phi, ramp()), UnsupportedDegreeError);
}

TEST(Piecewise, Multiply) {
  const auto p = multiply(PiecewiseFn::indicator(0.0, 1.0), PiecewiseFn::indicator(0.5, 2.0));
  EXPECT_EQ(p(0.4), 0.0);
  EXPECT_EQ(p(0.5), 1.0);
  EXPECT_EQ(p(1.0), 0.0);
  EXPECT_DOUBLE_EQ(integrate(p, 0.0), 0.5);
  EXPECT_TRUE(multiply(wiggle(), PiecewiseFn{}).is_zero());
  EXPECT_THROW(multiply(wiggle(), ramp()), UnsupportedDegreeError);
  const auto q = multiply(ramp(), ramp());
  for (double x : {0.1, 1.0, 1.9}) EXPECT_NEAR(q(x), x * x, 1e-15);
}

TEST(Piecewise, LinearCombinationAndDerivative) {
  const auto f = wiggle();
  const auto g = ramp();
  const auto c = add(scale(f, 2.0), g);
  for (double x : lin_grid(0.0, 7.0, 301)) EXPECT_NEAR(c(x), 2.0 * f(x) + g(x), 1e-13);
  const auto d = derivative(g);
  EXPECT_EQ(d(1.0), 1.0);
  EXPECT_EQ(d(3.0), 0.0);
  EXPECT_TRUE(subtract(f, f).is_zero() || max_abs(subtract(f, f)) == 0.0);
}

TEST(Piecewise, Antiderivative) {
  const auto g = ramp();
  const auto w = antiderivative(g);
  EXPECT_DOUBLE_EQ(w(1.0), 0.5);
  EXPECT_DOUBLE_EQ(w(10.0), 2.0);
  EXPECT_EQ(w.tail(), 2.0);
  EXPECT_THROW(antiderivative(wiggle()), UnsupportedDegreeError);
  EXPECT_THROW(antiderivative(PiecewiseFn::constant(1.0)), UnsupportedDegreeError);
}

TEST(Piecewise, ComposeAffineRestrictReflect) {
  const auto f = wiggle();
  const auto a = compose_affine(f, 0.5, 1.0);
  for (double x : lin_grid(0.0, 12.0, 241)) EXPECT_NEAR(a(x), f(0.5 * x + 1.0), 1e-12) << x;
  const auto r = restrict_to(f, 1.0, 4.5);
  for (double x : lin_grid(0.0, 7.0, 141)) EXPECT_NEAR(r(x), (x >= 1.0 && x < 4.5) ? f(x) : 0.0, 1e-12) << x;
  const auto m = reflect(f, 5.0);
  for (double x : lin_grid(0.01, 7.0, 140)) EXPECT_NEAR(m(x), x < 5.0 ? f(5.0 - x) : 0.0, 1e-12) << x;
}

TEST(Piecewise, MaxAbs) {
  EXPECT_EQ(max_abs(three_blocks()), 0.5);
  EXPECT_EQ(max_abs(PiecewiseFn::constant(-2.0)), 2.0);
  EXPECT_NEAR(max_abs(ramp()), 2.0, 1e-15);
}

TEST(Piecewise, CsvRoundTrip) {
  const auto f = wiggle();
  const auto text = to_csv(f);
  EXPECT_EQ(text.substr(0, text.find('\n')), "b,c0,c1,c2,c3");
  const auto g = from_csv(csv::parse_table(text));
  EXPECT_EQ(g.breakpoints(), f.breakpoints());
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(g.pieces()[i].c, f.pieces()[i].c);
  EXPECT_EQ(g.tail(), f.tail());
  const auto h = from_csv(csv::parse_table(to_csv(PiecewiseFn::constant(3.0))));
  EXPECT_EQ(h(100.0), 3.0);
}

TEST(Piecewise, BreakpointMerge) {
  // breakpoints 1e-13 apart collapse in merged operations
  const auto a = PiecewiseFn::indicator(0.0, 1.0);
  const auto b = PiecewiseFn::indicator(0.0, 1.0 + 1e-13);
  const auto s = add(a, b);
  EXPECT_EQ(s.size(), 1u);
}
