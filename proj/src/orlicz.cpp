#include "oiss/orlicz.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "oiss/csv.hpp"
#include "oiss/error.hpp"

namespace oiss {

NormSpec parse_norm_spec(std::string_view spec) {
  spec = csv::trim(spec);
  if (spec == "l1") return LpNorm{1.0};
  if (spec == "l2") return LpNorm{2.0};
  if (spec == "linf") return LinfNorm{};
  if (spec.starts_with("lp:")) {
    const auto p_text = spec.substr(3);
    if (p_text == "inf") return LinfNorm{};
    const double p = csv::parse_double(p_text);
    if (!(p >= 1.0)) throw ParseError(fmt::format("Lp norm needs p >= 1, got {}", p));
    return LpNorm{p};
  }
  if (spec.starts_with("luxemburg:")) return LuxemburgNorm{YoungFunction::parse(spec.substr(10))};
  throw ParseError("unknown norm '" + std::string(spec) + "' (expected l1, l2, lp:P, linf, luxemburg:PHI)");
}

std::string norm_name(const NormSpec& spec) {
  if (const auto* lp = std::get_if<LpNorm>(&spec)) return fmt::format("lp:{}", lp->p);
  if (std::holds_alternative<LinfNorm>(spec)) return "linf";
  return "luxemburg:" + std::get<LuxemburgNorm>(spec).phi.name();
}

namespace {

void require_integrable(const PiecewiseFn& f, const char* what) {
  if (!f.zero_tail()) throw DivergentIntegralError(fmt::format("{}: function has a nonzero tail", what));
}

// k -> modular(phi, f, k). For the power family the modular is k^-p * int |f|^p,
// so the integral is taken once.
std::function<double(double)> modular_evaluator(const YoungFunction& phi, const PiecewiseFn& f) {
  if (const auto* power = std::get_if<young::Power>(&phi.family())) {
    const double p = power->p;
    const double mass = integrate_map(f, [p](double v) { return std::pow(std::abs(v), p); }, 0.0);
    return [mass, p](double k) { return mass * std::pow(k, -p); };
  }
  return [&phi, &f](double k) {
    return integrate_map(f, [&phi, k](double v) { return phi(std::abs(v) / k); }, 0.0);
  };
}

}  // namespace

double modular(const YoungFunction& phi, const PiecewiseFn& f, double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw DomainError(fmt::format("modular needs a finite scale k > 0, got {}", k));
  require_integrable(f, "modular");
  return integrate_map(f, [&phi, k](double v) { return phi(std::abs(v) / k); }, 0.0);
}

NormResult luxemburg_level(const YoungFunction& phi, const PiecewiseFn& f, double level, double tol) {
  if (!(tol > 0.0)) throw DomainError("Luxemburg tolerance must be positive");
  if (!(level > 0.0) || !std::isfinite(level)) throw DomainError("modular level must be finite and positive");
  require_integrable(f, "luxemburg_norm");
  NormResult result;
  result.kind = LuxemburgNorm{phi};
  if (f.is_zero()) return result;

  const auto rho = modular_evaluator(phi, f);
  const double k0 = std::max(max_abs(f), tol);
  double lo = k0;
  double hi = k0;
  constexpr int kMaxSteps = 4000;
  if (rho(k0) <= level) {
    lo = 0.5 * k0;
    for (int i = 0; rho(lo) <= level; ++i) {
      if (i > kMaxSteps || lo == 0.0) throw DomainError("Luxemburg bracket: modular stays below the level");
      hi = lo;
      lo *= 0.5;
    }
  } else {
    hi = 2.0 * k0;
    for (int i = 0; rho(hi) > level; ++i) {
      if (i > kMaxSteps || !std::isfinite(hi)) throw DomainError("Luxemburg bracket: modular stays above the level");
      lo = hi;
      hi *= 2.0;
    }
  }
  // rho(hi) <= level < rho(lo)
  while (hi - lo > tol * hi) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (rho(mid) <= level) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  result.value = hi;
  result.k_lo = lo;
  result.k_hi = hi;
  result.certified_tolerance = tol * hi;
  return result;
}

NormResult luxemburg_norm(const YoungFunction& phi, const PiecewiseFn& f, double tol) {
  return luxemburg_level(phi, f, 1.0, tol);
}

NormResult lp_norm(const PiecewiseFn& f, double p) {
  if (std::isnan(p) || p < 1.0) throw DomainError(fmt::format("Lp norm needs p >= 1, got {}", p));
  NormResult result;
  if (std::isinf(p)) {
    result.kind = LinfNorm{};
    result.value = max_abs(f);
  } else {
    result.kind = LpNorm{p};
    require_integrable(f, "lp_norm");
    if (p == 1.0) {
      result.value = integrate_abs(f, 0.0);
    } else {
      const double mass = integrate_map(f, [p](double v) { return std::pow(std::abs(v), p); }, 0.0);
      result.value = std::pow(mass, 1.0 / p);
    }
  }
  result.k_lo = result.k_hi = result.value;
  return result;
}

NormResult z_norm(const NormSpec& spec, const PiecewiseFn& f, double tol) {
  if (const auto* lp = std::get_if<LpNorm>(&spec)) return lp_norm(f, lp->p);
  if (std::holds_alternative<LinfNorm>(spec)) return lp_norm(f, kInfinity);
  return luxemburg_norm(std::get<LuxemburgNorm>(spec).phi, f, tol);
}

bool MeanConvergenceReport::mean_convergent() const {
  return std::all_of(rows.begin(), rows.end(), [](const MeanConvergenceRow& r) { return r.settles_at.has_value(); });
}

namespace {

std::optional<std::size_t> settles_below(const std::vector<double>& values, double tol) {
  const double limit = tol * (1.0 + 1e-12);
  std::optional<std::size_t> at;
  for (std::size_t n = values.size(); n-- > 0;) {
    if (values[n] > limit) break;
    at = n;
  }
  return at;
}

}  // namespace

MeanConvergenceReport mean_convergence_check(const YoungFunction& phi, const std::vector<PiecewiseFn>& fs,
                                             const std::vector<double>& rs, double tol) {
  if (!(tol > 0.0)) throw DomainError("mean_convergence_check: tol must be positive");
  MeanConvergenceReport report;
  for (double r : rs) {
    if (!(r > 0.0)) throw DomainError("mean_convergence_check: r must be positive");
    MeanConvergenceRow row;
    row.r = r;
    for (const auto& f : fs) row.modulars.push_back(modular(phi, f, 1.0 / r));
    row.settles_at = settles_below(row.modulars, tol);
    report.rows.push_back(std::move(row));
  }
  for (const auto& f : fs) report.luxemburg_norms.push_back(luxemburg_norm(phi, f).value);
  report.norms_settle_at = settles_below(report.luxemburg_norms, tol);
  return report;
}

}  // namespace oiss
