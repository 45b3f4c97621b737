#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "oiss/error.hpp"
#include "oiss/grid.hpp"
#include "oiss/young.hpp"
#include "oracles.hpp"

using namespace oiss;

TEST(Young, PowerClosedForm) {
  EXPECT_DOUBLE_EQ(eval_young(YoungFunction::power(2), 2.0), 4.0);
  EXPECT_DOUBLE_EQ(eval_young(YoungFunction::power(3), 2.0), 8.0);
}

TEST(Young, ZeroAtOrigin) {
  for (const auto& phi : {YoungFunction::power(1), YoungFunction::power(2.5), YoungFunction::exp_minus(),
                          YoungFunction::tabulated({1.0, 2.0}, {1.0, 3.0})}) {
    EXPECT_EQ(eval_young(phi, 0.0), 0.0) << phi.name();
  }
}

TEST(Young, ExpMinusAtOne) {
  const auto phi = YoungFunction::exp_minus();
  const double expected = std::exp(1.0) - 2.0;
  EXPECT_NEAR(eval_young(phi, 1.0), expected, 1e-15);
  const double quad = oracle::simpson([](double s) { return std::exp(s) - 1.0; }, 0.0, 1.0);
  EXPECT_NEAR(eval_young(phi, 1.0), quad, 1e-12);
}

TEST(Young, ExpMinusSmallArgumentsKeepPrecision) {
  const auto phi = YoungFunction::exp_minus();
  for (double t : {1e-8, 1e-4, 0.1, 0.49, 0.51}) {
    // sum_{k>=2} t^k / k!, summed from the small end
    std::vector<double> terms;
    double term = t;
    for (int k = 2; k <= 30; ++k) terms.push_back(term *= t / k);
    double series = 0.0;
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) series += *it;
    EXPECT_NEAR(eval_young(phi, t) / series, 1.0, 1e-13) << t;
  }
}

TEST(Young, DomainErrors) {
  const auto phi = YoungFunction::power(2);
  EXPECT_THROW(eval_young(phi, -1.0), DomainError);
  EXPECT_THROW(eval_young(phi, std::nan("")), DomainError);
  EXPECT_THROW(eval_young(phi, INFINITY), DomainError);
  EXPECT_THROW(YoungFunction::power(0.5), DomainError);
}

TEST(Young, Parse) {
  EXPECT_EQ(std::get<young::Power>(YoungFunction::parse("power:2").family()).p, 2.0);
  EXPECT_TRUE(std::holds_alternative<young::ExpMinus>(YoungFunction::parse("exp_minus").family()));
  EXPECT_THROW(YoungFunction::parse("cosh"), ParseError);

  const auto path = std::filesystem::temp_directory_path() / "oiss_tabulated_phi.csv";
  {
    std::ofstream os(path);
    os << "s,phi\n0,0\n1,2\n2,4\n";
  }
  const auto tab = YoungFunction::parse("tabulated:" + path.string());
  EXPECT_TRUE(tab.interpolated());
  // phi(s) = 2s exactly, so Phi(t) = t^2
  EXPECT_NEAR(eval_young(tab, 1.5), 2.25, 1e-15);
  EXPECT_NEAR(eval_young(tab, 3.0), 9.0, 1e-14);  // slope continued past the table
}

TEST(Young, CheckLinearGeneratorPasses) {
  const auto report = check_young(YoungFunction::power(2), log_grid(1e-3, 1e3, 61), 10.0);
  for (const auto& c : report.checks) EXPECT_TRUE(c.pass) << c.property << ": " << c.detail;
}

TEST(Young, CheckBoundedGeneratorFailsDivergence) {
  // phi(s) = min(s, 1)
  const auto phi = YoungFunction::tabulated({0.0, 1.0, 2000.0}, {0.0, 1.0, 1.0});
  const auto report = check_young(phi, log_grid(1e-3, 1e3, 61), 10.0);
  EXPECT_FALSE(report.find(kGeneratorDiverges)->pass);
  EXPECT_TRUE(report.find(kGeneratorMonotone)->pass);
  EXPECT_TRUE(report.find(kPhiConvex)->pass);
  EXPECT_FALSE(report.all_pass());
}

TEST(Young, CheckExpMinusPasses) {
  const auto report = check_young(YoungFunction::exp_minus(), log_grid(1e-3, 30.0, 61), 10.0);
  for (const auto& c : report.checks) EXPECT_TRUE(c.pass) << c.property << ": " << c.detail;
}

TEST(Young, CheckDetectsDecreasingGenerator) {
  const auto phi = YoungFunction::tabulated({0.0, 1.0, 2.0, 3.0}, {0.0, 2.0, 1.0, 5.0});
  const auto report = check_young(phi, lin_grid(0.1, 3.0, 30), 1.0);
  EXPECT_FALSE(report.find(kGeneratorMonotone)->pass);
  EXPECT_FALSE(report.find(kPhiConvex)->pass);
  ASSERT_TRUE(report.find(kGeneratorMonotone)->first_failure.has_value());
  EXPECT_GT(*report.find(kGeneratorMonotone)->first_failure, 1.0);
}

TEST(Young, Delta2Power) {
  const auto grid = log_grid(1e-6, 1e2, 161);
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    const auto r = delta2_index(YoungFunction::power(p), grid);
    EXPECT_TRUE(r.delta2);
    EXPECT_NEAR(r.index / std::pow(2.0, p), 1.0, 1e-12) << p;
  }
}

TEST(Young, Delta2ExpMinus) {
  const auto phi = YoungFunction::exp_minus();
  const auto r = delta2_index(phi, log_grid(1e-6, 1e2, 161));
  EXPECT_FALSE(r.delta2);
  const double expected = (std::exp(40.0) - 41.0) / (std::exp(20.0) - 21.0);
  EXPECT_NEAR(eval_young(phi, 40.0) / eval_young(phi, 20.0) / expected, 1.0, 1e-13);
  EXPECT_GT(expected, 4.8e8);
}

TEST(Young, Delta2Errors) {
  EXPECT_THROW(delta2_index(YoungFunction::power(2), log_grid(1e-3, 1e2, 20)), DomainError);
  const auto flat_start = YoungFunction::tabulated({0.0, 1.0, 2.0}, {0.0, 0.0, 1.0});
  EXPECT_THROW(delta2_index(flat_start, log_grid(1e-6, 1e2, 161)), InvalidYoungError);
}

TEST(Young, MajorantPower2) {
  const auto phi1 = majorant_phi1(YoungFunction::power(2));
  EXPECT_NEAR(eval_young(phi1, 0.25), 1.0 / 6.0, 1e-14);
  EXPECT_NEAR(eval_young(phi1, 2.0), 64.0 / 3.0, 1e-12);
  EXPECT_NEAR(eval_young(phi1, std::nextafter(1.0, 0.0)), 4.0 / 3.0, 1e-12);
  EXPECT_NEAR(eval_young(phi1, 1.0), 4.0 / 3.0, 1e-15);
  for (double x : log_grid(1e-6, 1e6, 50)) {
    EXPECT_NEAR(eval_young(phi1, x) / oracle::phi1_power2(x), 1.0, 1e-12) << x;
  }
}

TEST(Young, MajorantLambdaByQuadrature) {
  // Lambda(x) = int_0^x phi(sqrt r) dr for exp_minus, against Simpson
  const auto phi = YoungFunction::exp_minus();
  for (double x : {0.1, 0.5, 0.9}) {
    const double quad = oracle::simpson([](double r) { return std::exp(std::sqrt(r)) - 1.0; }, 0.0, x, 200000);
    EXPECT_NEAR(phi.sqrt_generator_integral(x), quad, 1e-9) << x;
  }
}

TEST(Young, MajorantDominates) {
  const auto grid = log_grid(1e-6, 1e6, 400);
  for (const auto& phi : {YoungFunction::power(2), YoungFunction::power(3), YoungFunction::exp_minus()}) {
    const auto phi1 = majorant_phi1(phi);
    for (double x : grid) {
      const double a = eval_young(phi, x);
      const double b = eval_young(phi1, x);
      EXPECT_LE(a, b * (1.0 + 1e-12)) << phi.name() << " at " << x;
    }
  }
}

TEST(Young, MajorantRejectsVanishingPhiAtOne) {
  const auto phi = YoungFunction::tabulated({0.0, 1.0, 2.0}, {0.0, 0.0, 1.0});
  EXPECT_THROW(majorant_phi1(phi), InvalidYoungError);
}

TEST(Young, InverseRoundTrip) {
  for (const auto& phi : {YoungFunction::power(2), YoungFunction::power(1.5), YoungFunction::exp_minus()}) {
    for (double y : {1e-8, 1e-3, 0.5, 1.0, 7.0, 1e4}) {
      const double t = young_inverse(phi, y);
      EXPECT_NEAR(eval_young(phi, t) / y, 1.0, 1e-9) << phi.name() << " " << y;
    }
  }
  EXPECT_EQ(young_inverse(YoungFunction::power(2), 0.0), 0.0);
}
