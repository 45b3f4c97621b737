#include "oiss/young.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "oiss/csv.hpp"
#include "oiss/error.hpp"
#include "oiss/grid.hpp"
#include "oiss/quadrature.hpp"

namespace oiss {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kQuadAbs = 1e-12;
constexpr double kQuadRel = 1e-10;

// e^t - t - 1 without cancellation for small t.
double exp_minus_value(double t) {
  if (t < 0.5) {
    double term = t * t / 2.0;
    double sum = term;
    for (int n = 3; n < 30; ++n) {
      term *= t / n;
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    return sum;
  }
  return std::expm1(t) - t;
}

// int_0^x (e^sqrt(r) - 1) dr = 2((w - 1)e^w + 1) - w^2 with w = sqrt(x),
// i.e. sum_{n>=3} 2 (n-1) w^n / n!.
double exp_minus_lambda(double x) {
  const double w = std::sqrt(x);
  if (w < 0.5) {
    double power_over_factorial = w * w / 2.0;  // w^n / n! at n = 2
    double sum = 0.0;
    for (int n = 3; n < 40; ++n) {
      power_over_factorial *= w / n;
      const double term = 2.0 * (n - 1) * power_over_factorial;
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    return sum;
  }
  return 2.0 * ((w - 1.0) * std::exp(w) + 1.0) - x;
}

std::size_t segment_of(const std::vector<double>& s, double x) {
  // Index i with s[i] <= x < s[i+1], clamped to the last segment.
  const auto it = std::upper_bound(s.begin(), s.end(), x);
  const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - s.begin() - 1, 0));
  return std::min(i, s.size() - 2);
}

double tabulated_generator(const young::Tabulated& tab, double x) {
  const std::size_t i = segment_of(tab.s, x);
  const double slope = (tab.phi[i + 1] - tab.phi[i]) / (tab.s[i + 1] - tab.s[i]);
  return tab.phi[i] + slope * (x - tab.s[i]);
}

double tabulated_value(const young::Tabulated& tab, double x) {
  const std::size_t i = segment_of(tab.s, x);
  const double slope = (tab.phi[i + 1] - tab.phi[i]) / (tab.s[i + 1] - tab.s[i]);
  const double dx = x - tab.s[i];
  return tab.cumulative[i] + tab.phi[i] * dx + 0.5 * slope * dx * dx;
}

// int_0^x phi(sqrt(r)) dr = int_0^sqrt(x) 2 v phi(v) dv; exact for the linear interpolant.
double tabulated_lambda(const young::Tabulated& tab, double x) {
  const double w = std::sqrt(x);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < tab.s.size(); ++i) {
    const double a = tab.s[i];
    if (a >= w) break;
    const bool last = i + 2 >= tab.s.size();
    const double b = last ? w : std::min(w, tab.s[i + 1]);
    const double slope = (tab.phi[i + 1] - tab.phi[i]) / (tab.s[i + 1] - tab.s[i]);
    const double c0 = tab.phi[i] - slope * a;  // phi(v) = c0 + slope v on this segment
    auto antiderivative = [&](double v) { return c0 * v * v + 2.0 * slope * v * v * v / 3.0; };
    total += antiderivative(b) - antiderivative(a);
    if (last) break;
  }
  return total;
}

}  // namespace

YoungFunction YoungFunction::power(double p) {
  if (!std::isfinite(p) || p < 1.0) throw DomainError(fmt::format("power Young function needs p >= 1, got {}", p));
  return YoungFunction(young::Power{p});
}

YoungFunction YoungFunction::exp_minus() { return YoungFunction(young::ExpMinus{}); }

YoungFunction YoungFunction::tabulated(std::vector<double> s, std::vector<double> phi) {
  if (s.size() != phi.size() || s.empty()) throw DomainError("tabulated generator: s and phi must be nonempty and equally long");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i]) || !std::isfinite(phi[i]) || s[i] < 0.0) {
      throw DomainError("tabulated generator: samples must be finite with s >= 0");
    }
    if (i > 0 && !(s[i] > s[i - 1])) throw DomainError("tabulated generator: s must be strictly increasing");
  }
  if (s.front() > 0.0) {
    s.insert(s.begin(), 0.0);
    phi.insert(phi.begin(), 0.0);
  }
  if (s.size() < 2) throw DomainError("tabulated generator needs a sample beyond s = 0");
  std::vector<double> cumulative(s.size(), 0.0);
  for (std::size_t i = 1; i < s.size(); ++i) {
    cumulative[i] = cumulative[i - 1] + 0.5 * (phi[i] + phi[i - 1]) * (s[i] - s[i - 1]);
  }
  return YoungFunction(young::Tabulated{std::move(s), std::move(phi), std::move(cumulative)});
}

YoungFunction YoungFunction::parse(std::string_view spec) {
  spec = csv::trim(spec);
  if (spec == "exp_minus") return exp_minus();
  if (spec.starts_with("power:")) return power(csv::parse_double(spec.substr(6)));
  if (spec.starts_with("tabulated:")) {
    const auto table = csv::read_table(std::string(spec.substr(10)));
    if (table.header.size() != 2) throw ParseError("tabulated generator CSV needs exactly two columns s,phi");
    std::vector<double> s;
    std::vector<double> phi;
    for (const auto& row : table.rows) {
      s.push_back(row[0]);
      phi.push_back(row[1]);
    }
    return tabulated(std::move(s), std::move(phi));
  }
  throw ParseError("unknown Young function '" + std::string(spec) + "' (expected power:P, exp_minus, tabulated:PATH)");
}

double YoungFunction::operator()(double t) const {
  return std::visit(
      Overloaded{
          [t](const young::Power& f) { return std::pow(t, f.p); },
          [t](const young::ExpMinus&) { return exp_minus_value(t); },
          [t](const young::Tabulated& f) { return tabulated_value(f, t); },
          [t](const young::PiecewiseMajorant& f) {
            return t < f.switch_point ? f.base->sqrt_generator_integral(t) : f.scale * (*f.base)(t * t);
          },
      },
      family_);
}

double YoungFunction::generator(double s) const {
  return std::visit(
      Overloaded{
          [s](const young::Power& f) { return f.p == 1.0 ? 1.0 : f.p * std::pow(s, f.p - 1.0); },
          [s](const young::ExpMinus&) { return std::expm1(s); },
          [s](const young::Tabulated& f) { return tabulated_generator(f, s); },
          [s](const young::PiecewiseMajorant& f) {
            return s < f.switch_point ? f.base->generator(std::sqrt(s))
                                      : f.scale * 2.0 * s * f.base->generator(s * s);
          },
      },
      family_);
}

double YoungFunction::sqrt_generator_integral(double x) const {
  return std::visit(
      Overloaded{
          [x](const young::Power& f) { return 2.0 * f.p / (f.p + 1.0) * std::pow(x, 0.5 * (f.p + 1.0)); },
          [x](const young::ExpMinus&) { return exp_minus_lambda(x); },
          [x](const young::Tabulated& f) { return tabulated_lambda(f, x); },
          [this, x](const young::PiecewiseMajorant& f) {
            // int_0^sqrt(x) 2 v phi1(v) dv, split where phi1 changes formula.
            auto integrand = [this](double v) { return 2.0 * v * generator(v); };
            const double w = std::sqrt(x);
            if (w <= f.switch_point) return quad::adaptive(integrand, 0.0, w, kQuadAbs, kQuadRel);
            return quad::adaptive(integrand, 0.0, f.switch_point, kQuadAbs, kQuadRel) +
                   quad::adaptive(integrand, f.switch_point, w, kQuadAbs, kQuadRel);
          },
      },
      family_);
}

bool YoungFunction::interpolated() const {
  if (std::holds_alternative<young::Tabulated>(family_)) return true;
  if (const auto* m = std::get_if<young::PiecewiseMajorant>(&family_)) return m->base->interpolated();
  return false;
}

std::string YoungFunction::name() const {
  return std::visit(Overloaded{
                        [](const young::Power& f) { return fmt::format("power:{}", f.p); },
                        [](const young::ExpMinus&) { return std::string("exp_minus"); },
                        [](const young::Tabulated&) { return std::string("tabulated"); },
                        [](const young::PiecewiseMajorant& f) { return "majorant(" + f.base->name() + ")"; },
                    },
                    family_);
}

double eval_young(const YoungFunction& phi, double t) {
  if (!std::isfinite(t) || t < 0.0) throw DomainError(fmt::format("Young function argument must be finite and >= 0, got {}", t));
  if (t == 0.0) return 0.0;
  return phi(t);
}

double young_inverse(const YoungFunction& phi, double y) {
  if (!std::isfinite(y) || y < 0.0) throw DomainError(fmt::format("young_inverse needs finite y >= 0, got {}", y));
  if (y == 0.0) return 0.0;
  double lo = 1.0;
  double hi = 1.0;
  while (phi(hi) < y) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw DomainError("young_inverse: Phi stays below the target on the representable range");
  }
  if (lo == hi) {
    while (lo > std::numeric_limits<double>::min() && phi(lo) >= y) lo *= 0.5;
  }
  // Invariant: phi(lo) < y <= phi(hi). Bisect to adjacent doubles.
  for (int i = 0; i < 2100; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (phi(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(phi(lo) - y) < std::abs(phi(hi) - y) ? lo : hi;
}

bool ValidityReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.pass; });
}

const PropertyCheck* ValidityReport::find(std::string_view property) const {
  for (const auto& c : checks) {
    if (c.property == property) return &c;
  }
  return nullptr;
}

namespace {

void fail_at(PropertyCheck& check, double where, std::string detail) {
  if (!check.pass) return;
  check.pass = false;
  check.first_failure = where;
  check.detail = std::move(detail);
}

// int_0^t phi(s) ds, split at points where the generator changes formula.
double integrate_generator(const YoungFunction& phi, double t) {
  std::vector<double> cuts{0.0};
  if (const auto* tab = std::get_if<young::Tabulated>(&phi.family())) {
    for (double s : tab->s) {
      if (s > 0.0 && s < t) cuts.push_back(s);
    }
  } else if (const auto* m = std::get_if<young::PiecewiseMajorant>(&phi.family())) {
    if (m->switch_point < t) cuts.push_back(m->switch_point);
  }
  cuts.push_back(t);
  auto g = [&phi](double s) { return phi.generator(s); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += quad::adaptive(g, cuts[i], cuts[i + 1], 1e-15, 1e-12);
  }
  return total;
}

}  // namespace

ValidityReport check_young(const YoungFunction& phi, const std::vector<double>& grid, double blowup_threshold) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i]) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      throw DomainError("check_young: grid must be positive, finite and strictly increasing");
    }
  }
  if (grid.empty()) throw DomainError("check_young: grid is empty");

  ValidityReport report;
  PropertyCheck at_zero{std::string(kGeneratorAtZero), true, std::nullopt, {}};
  PropertyCheck positive{std::string(kGeneratorPositive), true, std::nullopt, {}};
  PropertyCheck monotone{std::string(kGeneratorMonotone), true, std::nullopt, {}};
  PropertyCheck diverges{std::string(kGeneratorDiverges), true, std::nullopt, {}};
  PropertyCheck phi_zero{std::string(kPhiZeroAtOrigin), true, std::nullopt, {}};
  PropertyCheck phi_monotone{std::string(kPhiMonotone), true, std::nullopt, {}};
  PropertyCheck convex{std::string(kPhiConvex), true, std::nullopt, {}};
  PropertyCheck integral{std::string(kPhiIntegral), true, std::nullopt, {}};

  if (const double g0 = phi.generator(0.0); g0 != 0.0) fail_at(at_zero, 0.0, fmt::format("phi(0) = {}", g0));
  if (const double v0 = phi(0.0); v0 != 0.0) fail_at(phi_zero, 0.0, fmt::format("Phi(0) = {}", v0));

  double prev_g = phi.generator(0.0);
  double prev_x = 0.0;
  double prev_v = 0.0;
  std::size_t skipped = 0;
  for (double s : grid) {
    const double g = phi.generator(s);
    const double v = phi(s);
    if (!(g > 0.0)) fail_at(positive, s, fmt::format("phi({}) = {}", s, g));
    if (g < prev_g) fail_at(monotone, s, fmt::format("phi decreases to {} at {}", g, s));
    if (v < prev_v) fail_at(phi_monotone, s, fmt::format("Phi decreases to {} at {}", v, s));
    const double mid = phi(0.5 * (prev_x + s));
    const double chord = 0.5 * (prev_v + v);
    if (mid > chord * (1.0 + 1e-12)) fail_at(convex, s, fmt::format("midpoint value {} above chord {}", mid, chord));
    if (std::isfinite(v)) {
      const double q = integrate_generator(phi, s);
      if (std::abs(q - v) > 1e-9 * std::abs(v) + 1e-300) {
        fail_at(integral, s, fmt::format("quadrature {} vs Phi {}", q, v));
      }
    } else {
      ++skipped;
    }
    prev_g = g;
    prev_x = s;
    prev_v = v;
  }
  if (const double g_max = phi.generator(grid.back()); !(g_max >= blowup_threshold)) {
    fail_at(diverges, grid.back(), fmt::format("phi(s_max) = {} below threshold {}", g_max, blowup_threshold));
  }

  report.checks = {at_zero, positive, monotone, diverges, phi_zero, phi_monotone, convex, integral};
  if (skipped > 0) {
    report.notes.push_back(fmt::format("{} samples with non-finite Phi skipped in the integral check", skipped));
  }
  if (phi.interpolated()) {
    report.notes.push_back("generator linearly interpolated between tabulated samples");
  }
  report.notes.push_back("right-continuity of the generator is assumed, not tested");
  return report;
}

Delta2Result delta2_index(const YoungFunction& phi, const std::vector<double>& grid, double cap) {
  require_increasing(grid, "delta2_index");
  if (grid.front() > 1e-6 * (1.0 + 1e-9) || grid.back() < 1e2 * (1.0 - 1e-9)) {
    throw DomainError("delta2_index: grid must cover at least [1e-6, 1e2]");
  }
  Delta2Result result;
  for (double s : grid) {
    if (s <= 0.0) continue;
    const double v = phi(s);
    if (!(v > 0.0)) throw InvalidYoungError(fmt::format("Phi({}) = {} at a positive grid point", s, v));
    const double v2 = phi(2.0 * s);
    const double ratio = std::isfinite(v2) && std::isfinite(v) ? v2 / v : std::numeric_limits<double>::infinity();
    result.ratios.push_back(ratio);
    result.index = std::max(result.index, ratio);
  }
  const auto& r = result.ratios;
  const std::size_t n = r.size();
  if (n >= 1 && std::isinf(r.back())) {
    result.delta2 = false;
  } else if (n >= 3 && r[n - 3] < r[n - 2] && r[n - 2] < r[n - 1] && r[n - 1] > cap) {
    result.delta2 = false;
  }
  return result;
}

YoungFunction majorant_phi1(const YoungFunction& phi) {
  const double base_one = phi(1.0);
  if (!(base_one > 0.0) || !std::isfinite(base_one)) {
    throw InvalidYoungError(fmt::format("majorant needs 0 < Phi(1) < inf, got {}", base_one));
  }
  young::PiecewiseMajorant m;
  m.base = std::make_shared<const YoungFunction>(phi);
  m.switch_point = 1.0;
  m.lambda_at_switch = phi.sqrt_generator_integral(1.0);
  m.base_at_switch = base_one;
  m.scale = m.lambda_at_switch / base_one;
  return YoungFunction(std::move(m));
}

}  // namespace oiss
