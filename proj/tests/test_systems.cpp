#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "oiss/error.hpp"
#include "oiss/grid.hpp"
#include "oiss/systems.hpp"
#include "oracles.hpp"

using namespace oiss;

namespace {

const PiecewiseFn& fn(const StateFn& x) { return std::get<PiecewiseFn>(x); }
const Sequence& seq(const StateFn& x) { return std::get<Sequence>(x); }

StateSegments hold(const PiecewiseFn& v, double t) { return StateSegments{{0.0, t}, {v}}; }

// Translation input switching between two profiles at s = 0.7.
StateSegments two_segments() {
  return StateSegments{{0.0, 0.7, 3.0},
                       {PiecewiseFn::indicator(0.0, 1.0), PiecewiseFn::step({0.5, 1.5, 2.5}, {2.0, -1.0})}};
}

}  // namespace

TEST(Models, ParseAndValidate) {
  EXPECT_TRUE(std::holds_alternative<TranslationL1>(parse_model("translation")));
  const auto s = std::get<ScalarODE>(parse_model("scalar:-1:2"));
  EXPECT_EQ(s.lambda, -1.0);
  EXPECT_EQ(s.b, 2.0);
  EXPECT_THROW(parse_model("heat"), ParseError);
  EXPECT_THROW(validate_model(ScalarODE{0.5, 1.0}), DomainError);
  EXPECT_THROW(validate_model(Diagonal{}), DomainError);

  const auto path = std::filesystem::temp_directory_path() / "oiss_diag.csv";
  {
    std::ofstream os(path);
    os << "lambda,b\n-1,1\n-0.5,0.25\n";
  }
  const auto d = std::get<Diagonal>(parse_model("diagonal:" + path.string()));
  EXPECT_EQ(d.lambda, (std::vector<double>{-1.0, -0.5}));
  EXPECT_EQ(d.b, (std::vector<double>{1.0, 0.25}));
}

TEST(Semigroup, Examples) {
  const auto half = apply_semigroup(TranslationL1{}, 0.5, PiecewiseFn::indicator(0.0, 1.0));
  EXPECT_EQ(state_norm(half), 0.5);
  EXPECT_EQ(fn(half)(0.49), 1.0);
  EXPECT_EQ(fn(half)(0.5), 0.0);
  EXPECT_NEAR(seq(apply_semigroup(ScalarODE{-1.0, 1.0}, std::numbers::ln2, Sequence{1.0}))[0], 0.5, 1e-16);
  const Sequence x{1.0, -2.0, 3.0};
  EXPECT_EQ(seq(apply_semigroup(Diagonal::harmonic(3), 0.0, x)), x);
  EXPECT_THROW(apply_semigroup(TranslationL1{}, 1.0, Sequence{1.0}), ModelStateMismatchError);
  EXPECT_THROW(apply_semigroup(ScalarODE{}, -1.0, Sequence{1.0}), DomainError);
}

TEST(Semigroup, Law) {
  const auto f = PiecewiseFn::step({0.2, 1.0, 2.5, 4.0}, {1.0, -3.0, 0.5});
  for (auto [s, t] : {std::pair{0.1, 0.4}, {1.0, 2.0}, {0.3, 7.0}}) {
    const auto a = apply_semigroup(TranslationL1{}, t, apply_semigroup(TranslationL1{}, s, f));
    const auto b = apply_semigroup(TranslationL1{}, s + t, f);
    EXPECT_LE(state_norm(state_difference(a, b)), 1e-15);

    const Diagonal d = Diagonal::harmonic(50);
    const Sequence x(50, 1.0);
    const auto c = apply_semigroup(d, t, apply_semigroup(d, s, x));
    const auto e = apply_semigroup(d, s + t, x);
    EXPECT_LE(state_norm(state_difference(c, e)), 1e-12);
  }
}

TEST(Stability, Probe) {
  const auto r = strong_stability_probe(TranslationL1{}, PiecewiseFn::indicator(0.0, 1.0), {0.0, 0.5, 2.0});
  EXPECT_EQ(r.norms.back(), 0.0);
  EXPECT_TRUE(r.monotone);
  EXPECT_TRUE(r.below_threshold);

  const auto s = strong_stability_probe(ScalarODE{-1.0, 1.0}, Sequence{1.0}, {0.0, 1.0, 2.0});
  EXPECT_EQ(s.norms[0], 1.0);
  EXPECT_NEAR(s.norms[1], std::exp(-1.0), 1e-16);
  EXPECT_NEAR(s.norms[2], std::exp(-2.0), 1e-16);

  Sequence e50(100, 0.0);
  e50[49] = 1.0;
  const auto d = strong_stability_probe(Diagonal::harmonic(100), e50, {100.0});
  EXPECT_NEAR(d.norms[0], 0.1353352832366127, 1e-15);
  EXPECT_FALSE(d.below_threshold);
}

TEST(Mild, ScalarConstantInput) {
  const ScalarODE m{-1.0, 1.0};
  const auto x = mild_solution(m, Sequence{0.0}, ScalarSignal{PiecewiseFn::constant(1.0)}, 1.0);
  EXPECT_NEAR(seq(x)[0], 1.0 - std::exp(-1.0), 1e-15);
  // against an independent Simpson quadrature of int_0^1 e^-(1-s) ds
  const double quad = oracle::simpson([](double s) { return std::exp(-(1.0 - s)); }, 0.0, 1.0);
  EXPECT_NEAR(seq(x)[0], quad, 1e-12);
  for (double t : {0.3, 2.0, 9.0}) {
    const auto y = mild_solution(ScalarODE{-0.5, 2.0}, Sequence{1.5}, ScalarSignal{PiecewiseFn::constant(0.7)}, t);
    EXPECT_NEAR(seq(y)[0], oracle::scalar_constant_input(-0.5, 2.0 * 0.7, 1.5, t), 1e-13);
  }
}

TEST(Mild, ZeroInputIsSemigroup) {
  const auto f = PiecewiseFn::step({0.0, 2.0}, {3.0});
  EXPECT_DOUBLE_EQ(state_norm(mild_solution(TranslationL1{}, f, ZeroInput{}, 0.5)), 4.5);
  const Sequence x{1.0, 2.0};
  const auto y = mild_solution(Diagonal::harmonic(2), x, ZeroInput{}, 3.0);
  EXPECT_EQ(seq(y), seq(apply_semigroup(Diagonal::harmonic(2), 3.0, x)));
}

TEST(Mild, TranslationHeldIndicator) {
  const auto chi = PiecewiseFn::indicator(0.0, 1.0);
  const auto x = mild_solution(TranslationL1{}, PiecewiseFn{}, hold(chi, 1.0), 1.0);
  EXPECT_NEAR(state_norm(x), 0.5, 1e-15);
  for (double r : lin_grid(0.0, 1.5, 151)) EXPECT_NEAR(fn(x)(r), r < 1.0 ? 1.0 - r : 0.0, 1e-14) << r;

  // the same input through the quadrature path
  SampledInput sampled{[chi](double) { return chi; }, 1.0};
  QuadratureInfo info;
  const auto q = mild_solution(TranslationL1{}, PiecewiseFn{}, sampled, 1.0, &info);
  EXPECT_TRUE(info.converged);
  EXPECT_GT(info.panels, 0u);
  EXPECT_NEAR(state_norm(state_difference(q, x)), 0.0, 1e-9);
}

TEST(Mild, InputDomain) {
  EXPECT_THROW(mild_solution(TranslationL1{}, PiecewiseFn{}, hold(PiecewiseFn::indicator(0.0, 1.0), 1.0), 2.0),
               InputDomainError);
  EXPECT_THROW(mild_solution(ScalarODE{-1.0, 1.0}, Sequence{0.0}, hold(PiecewiseFn::indicator(0.0, 1.0), 1.0), 1.0),
               ModelStateMismatchError);
}

TEST(Mild, Linearity) {
  const auto x0 = PiecewiseFn::step({0.0, 1.5}, {2.0});
  const auto y0 = PiecewiseFn::step({1.0, 2.0, 4.0}, {1.0, -0.5});
  const auto u = two_segments();
  StateSegments v{u.times, {PiecewiseFn::indicator(2.0, 3.0, 4.0), PiecewiseFn::indicator(0.0, 0.5, -1.0)}};
  StateSegments uv{u.times, {add(u.values[0], v.values[0]), add(u.values[1], v.values[1])}};
  for (double t : {0.5, 1.0, 2.9}) {
    const auto lhs = add(fn(mild_solution(TranslationL1{}, x0, u, t)), fn(mild_solution(TranslationL1{}, y0, v, t)));
    const auto rhs = fn(mild_solution(TranslationL1{}, add(x0, y0), uv, t));
    EXPECT_LE(state_norm(state_difference(lhs, rhs)), 1e-9 * std::max(1.0, state_norm(rhs))) << t;
  }
  const Diagonal d = Diagonal::harmonic(5);
  const ScalarSignal a{PiecewiseFn::step({0.0, 1.0, 2.0}, {1.0, -2.0}, 0.5)};
  const ScalarSignal b{PiecewiseFn::step({0.0, 0.5}, {3.0}, -1.0)};
  const ScalarSignal ab{add(a.value, b.value)};
  const Sequence p(5, 1.0), q{0.0, 2.0, 0.0, -1.0, 0.0};
  Sequence pq(5);
  for (int i = 0; i < 5; ++i) pq[i] = p[i] + q[i];
  const auto s1 = seq(mild_solution(d, p, a, 3.0));
  const auto s2 = seq(mild_solution(d, q, b, 3.0));
  const auto s3 = seq(mild_solution(d, pq, ab, 3.0));
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(s1[i] + s2[i], s3[i], 1e-12);
}

TEST(Mild, TranslationContraction) {
  const auto x0 = PiecewiseFn::step({0.0, 1.5}, {2.0});
  const auto u = two_segments();
  for (double t : {0.5, 1.0, 2.0, 3.0}) {
    const double lhs = state_norm(mild_solution(TranslationL1{}, x0, u, t));
    const double rhs = state_norm(x0) + integrate(norm_profile(u, t), 0.0, t);
    EXPECT_LE(lhs, rhs + 1e-9) << t;
  }
}

TEST(Map, Examples) {
  EXPECT_EQ(state_norm(input_to_state_map(TranslationL1{}, ZeroInput{}, 3.0)), 0.0);
  EXPECT_DOUBLE_EQ(seq(input_to_state_map(ScalarODE{0.0, 1.0}, ScalarSignal{PiecewiseFn::constant(1.0)}, 2.0))[0], 2.0);
}

TEST(Map, AgreesWithReversedMild) {
  const auto u = two_segments();
  for (double t : {0.5, 1.7, 3.0}) {
    const auto a = input_to_state_map(TranslationL1{}, u, t);
    const auto b = mild_solution(TranslationL1{}, PiecewiseFn{}, reverse_in_time(u, t), t);
    EXPECT_LE(state_norm(state_difference(a, b)), 1e-8 * std::max(1.0, state_norm(a))) << t;
  }
  const ScalarSignal w{PiecewiseFn::step({0.0, 1.0, 2.5}, {1.0, -2.0}, 0.5)};
  for (const SystemModel& m : {SystemModel{ScalarODE{-0.3, 2.0}}, SystemModel{Diagonal::harmonic(4)}}) {
    for (double t : {0.5, 2.0, 4.0}) {
      const auto a = input_to_state_map(m, w, t);
      const auto b = mild_solution(m, zero_state(m), reverse_in_time(w, t), t);
      EXPECT_LE(state_norm(state_difference(a, b)), 1e-8 * std::max(1.0, state_norm(a)));
    }
  }
}

TEST(Map, SampledAgreesWithSegments) {
  const auto u = two_segments();
  SampledInput sampled{[u](double s) { return s < 0.7 ? u.values[0] : u.values[1]; }, 3.0};
  // the switch at 0.7 is not a panel edge, so accuracy comes from refinement
  const auto exact = input_to_state_map(TranslationL1{}, u, 1.0);
  QuadratureInfo info;
  const auto approx = input_to_state_map(TranslationL1{}, sampled, 1.0, &info);
  EXPECT_LE(state_norm(state_difference(exact, approx)), 1e-2);
}

TEST(States, Truncation) {
  const auto t = truncate_state(Sequence{1.0, -2.0, 3.0, -4.0}, 2);
  EXPECT_EQ(t.head, (Sequence{1.0, -2.0}));
  EXPECT_EQ(t.tail_mass, 7.0);
  EXPECT_EQ(state_norm(Sequence{1.0, -2.0}), 3.0);
}

TEST(Inputs, NormProfile) {
  const auto p = norm_profile(two_segments(), 3.0);
  EXPECT_EQ(p(0.3), 1.0);
  EXPECT_EQ(p(1.0), 3.0);
  EXPECT_EQ(p(3.5), 0.0);
  EXPECT_THROW(norm_profile(two_segments(), 4.0), InputDomainError);
  EXPECT_EQ(norm_profile(ScalarSignal{PiecewiseFn::constant(-2.0)}, 1.0)(0.5), 2.0);
  SampledInput sampled{[](double) { return PiecewiseFn{}; }, 1.0};
  EXPECT_THROW(norm_profile(sampled, 1.0), InputDomainError);
}
