#include "oiss/admissibility.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "oiss/error.hpp"
#include "oiss/grid.hpp"

namespace oiss {

std::string class_name(ComparisonClass c) {
  switch (c) {
    case ComparisonClass::K:
      return "K";
    case ComparisonClass::KInfinity:
      return "Kinf";
    case ComparisonClass::L:
      return "L";
  }
  return "?";
}

ComparisonFn ComparisonFn::identity() { return {[](double x) { return x; }, ComparisonClass::KInfinity, "id"}; }

ComparisonFn ComparisonFn::linear(double slope) {
  if (!(slope > 0.0)) throw DomainError("linear comparison function needs a positive slope");
  return {[slope](double x) { return slope * x; }, ComparisonClass::KInfinity, fmt::format("{}*s", slope)};
}

ComparisonFn ComparisonFn::power(double p, double coefficient) {
  if (!(p > 0.0) || !(coefficient > 0.0)) throw DomainError("power comparison function needs p > 0, coefficient > 0");
  return {[p, coefficient](double x) { return coefficient * std::pow(x, p); }, ComparisonClass::KInfinity,
          fmt::format("{}*s^{}", coefficient, p)};
}

ComparisonFn ComparisonFn::exponential_decay(double m, double omega, double x0_norm) {
  if (!(m > 0.0) || !(omega > 0.0)) throw DomainError("exponential decay needs M > 0 and omega > 0");
  return {[m, omega, x0_norm](double t) { return m * x0_norm * std::exp(-omega * t); }, ComparisonClass::L,
          fmt::format("{}*{}*exp(-{}t)", m, x0_norm, omega)};
}

ComparisonFn ComparisonFn::semigroup_orbit(const SystemModel& model, const StateFn& x0) {
  return {[model, x0](double t) { return state_norm(apply_semigroup(model, t, x0)); }, ComparisonClass::L,
          "||T(t)x0||"};
}

namespace {

ClassCheck fail(double at, std::string detail) { return ClassCheck{false, at, std::move(detail)}; }

}  // namespace

ClassCheck check_class(const ComparisonFn& f, const ClassCheckOptions& options) {
  const std::vector<double> grid = options.grid.empty() ? log_grid(1e-6, 1e6, 200) : options.grid;
  require_increasing(grid, "class probe grid");
  std::vector<double> values;
  values.reserve(grid.size());
  for (double x : grid) {
    const double v = f(x);
    if (std::isnan(v)) return fail(x, "value is NaN");
    values.push_back(v);
  }
  // Continuity: between adjacent probes, bisect toward the half with the larger
  // change until the interval is a relative jump_step wide. A jump survives
  // the bisection, a continuous function's change shrinks with the interval.
  auto jump_at = [&](double lo, double hi, double flo, double fhi) -> std::optional<ClassCheck> {
    while (hi - lo > options.jump_step * std::max(hi, 1e-300)) {
      const double mid = 0.5 * (lo + hi);
      if (!(mid > lo && mid < hi)) break;
      const double fm = f(mid);
      if (std::abs(fm - flo) >= std::abs(fhi - fm)) {
        hi = mid;
        fhi = fm;
      } else {
        lo = mid;
        flo = fm;
      }
    }
    if (std::abs(fhi - flo) > options.jump_bound * std::max(1.0, std::abs(flo))) {
      return fail(lo, fmt::format("jump of {} within a relative step {}", fhi - flo, options.jump_step));
    }
    return std::nullopt;
  };
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (auto c = jump_at(grid[i], grid[i + 1], values[i], values[i + 1])) return *c;
  }
  {
    const double x = grid.back();
    const double nearby = f(x * (1.0 + options.jump_step));
    if (std::abs(nearby - values.back()) > options.jump_bound * std::max(1.0, std::abs(values.back()))) {
      return fail(x, fmt::format("jump of {} within a relative step {}", nearby - values.back(), options.jump_step));
    }
  }

  if (f.claim == ComparisonClass::L) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (values[i] < 0.0) return fail(grid[i], "negative value");
      if (i > 0 && values[i - 1] > 0.0 && !(values[i] < values[i - 1])) {
        return fail(grid[i], "not strictly decreasing");
      }
      if (i > 0 && values[i - 1] == 0.0 && values[i] != 0.0) return fail(grid[i], "leaves zero again");
    }
    if (!(values.back() <= options.l_threshold)) {
      return fail(grid.back(), fmt::format("value {} at the grid end is above {}", values.back(), options.l_threshold));
    }
    return {};
  }

  if (const double v0 = f(0.0); v0 != 0.0) return fail(0.0, fmt::format("value {} at 0", v0));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(values[i] > (i == 0 ? 0.0 : values[i - 1]))) return fail(grid[i], "not strictly increasing");
  }
  if (f.claim == ComparisonClass::KInfinity && !(values.back() >= options.kinf_threshold)) {
    return fail(grid.back(), fmt::format("value {} at the grid end is below {}", values.back(), options.kinf_threshold));
  }
  return {};
}

AdmissibilityEntry admissibility_constant(const SystemModel& model, const NormSpec& z, double t,
                                          const std::vector<NamedInput>& family) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("admissibility_constant needs a finite t > 0");
  if (family.empty()) throw DomainError("admissibility_constant: empty input family");
  AdmissibilityEntry entry;
  entry.t = t;
  bool any = false;
  for (const auto& member : family) {
    const double norm = z_norm(z, norm_profile(member.input, t)).value;
    if (norm == 0.0) {
      entry.warnings.push_back(fmt::format("input '{}' has zero {} norm on [0, {}]; skipped", member.name,
                                           norm_name(z), t));
      continue;
    }
    const double ratio = state_norm(input_to_state_map(model, member.input, t)) / norm;
    if (!any || ratio > entry.best_ratio) {
      entry.best_ratio = ratio;
      entry.witness = member.name;
      any = true;
    }
  }
  if (!any) throw DomainError("admissibility_constant: every input in the family has zero norm");
  entry.running_max = entry.best_ratio;
  return entry;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::BoundedEvidence:
      return "bounded-evidence";
    case Verdict::UnboundedEvidence:
      return "unbounded-evidence";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

AdmissibilityReport infinite_time_verdict(const SystemModel& model, const NormSpec& z, const std::vector<double>& t_grid,
                                          const FamilyGenerator& family, double growth_factor) {
  require_increasing(t_grid, "admissibility time grid");
  if (t_grid.size() < 5) throw DomainError("infinite_time_verdict needs at least 5 grid points");
  if (!(t_grid.front() > 0.0) || t_grid.back() / t_grid.front() < 1e3) {
    throw DomainError("infinite_time_verdict needs a positive grid spanning at least 3 decades");
  }
  AdmissibilityReport report;
  double running = 0.0;
  for (double t : t_grid) {
    AdmissibilityEntry entry = admissibility_constant(model, z, t, family(t));
    running = std::max(running, entry.best_ratio);
    entry.running_max = running;
    report.entries.push_back(std::move(entry));
  }
  const auto& e = report.entries;
  const std::size_t n = e.size();
  const double first = e.front().running_max;
  const double mid = e[n / 2].running_max;
  const double last = e.back().running_max;
  report.c_infinity_estimate = last;
  report.growth = first > 0.0 ? last / first : kInfinity;
  if (std::abs(last - mid) <= 0.01 * mid) {
    report.verdict = Verdict::BoundedEvidence;
  } else if (last > growth_factor * first && e[n - 3].running_max < e[n - 2].running_max &&
             e[n - 2].running_max < last) {
    report.verdict = Verdict::UnboundedEvidence;
  }
  return report;
}

std::vector<NamedInput> shifted_bumps(const SystemModel& model, double t) {
  std::vector<NamedInput> out;
  if (std::holds_alternative<TranslationL1>(model)) {
    for (double m : {0.0, t + 1.0}) {
      out.push_back({fmt::format("bump@{}", m), StateSegments{{0.0, t}, {PiecewiseFn::indicator(m, m + 1.0)}}});
    }
    return out;
  }
  for (double m : {0.0, std::max(0.0, t - 1.0)}) {
    out.push_back({fmt::format("bump@{}", m), ScalarSignal{PiecewiseFn::indicator(m, m + 1.0)}});
    if (t <= 1.0) break;
  }
  return out;
}

std::vector<NamedInput> constant_family(const SystemModel& model, double t) {
  if (std::holds_alternative<TranslationL1>(model)) {
    return {{"const", StateSegments{{0.0, t}, {PiecewiseFn::indicator(0.0, 1.0)}}}};
  }
  return {{"const", ScalarSignal{PiecewiseFn::constant(1.0)}}};
}

namespace {

void require_claim(const ComparisonFn& f, std::initializer_list<ComparisonClass> allowed, const char* role) {
  if (std::find(allowed.begin(), allowed.end(), f.claim) == allowed.end()) {
    throw RejectedCertificateError(fmt::format("{} '{}' claims class {}", role, f.name, class_name(f.claim)));
  }
}

void certify(const ComparisonFn& f, const ClassCheckOptions& options, const char* role) {
  const ClassCheck c = check_class(f, options);
  if (!c.pass) {
    throw RejectedCertificateError(fmt::format("{} '{}' fails its class {} check at {}: {}", role, f.name,
                                               class_name(f.claim), c.first_failure.value_or(0.0), c.detail));
  }
}

void certify_beta(const ComparisonFn& beta, const ClassCheckOptions& options) {
  require_claim(beta, {ComparisonClass::L}, "beta");
  const std::vector<double> grid = options.grid.empty() ? log_grid(1e-6, 1e6, 200) : options.grid;
  const bool vanishes = std::all_of(grid.begin(), grid.end(), [&](double t) { return beta(t) == 0.0; });
  if (!vanishes) certify(beta, options, "beta");
}

template <typename Rhs>
CertificateReport run_certificate(const SystemModel& model, const StateFn& x0, const InputAt& input_at,
                                  const std::vector<double>& t_grid, double slack, Rhs rhs_at) {
  require_increasing(t_grid, "certificate time grid");
  CertificateReport report;
  for (double t : t_grid) {
    const Input u = input_at(t);
    CertificateRow row;
    row.t = t;
    row.lhs = state_norm(mild_solution(model, x0, u, t));
    row.rhs = rhs_at(u, t);
    row.pass = row.lhs <= row.rhs + slack;
    report.rows.push_back(row);
    if (!row.pass) {
      report.pass = false;
      report.first_failure = report.rows.size() - 1;
      break;
    }
  }
  return report;
}

}  // namespace

CertificateReport verify_siss(const SystemModel& model, const StateFn& x0, const InputAt& input_at,
                              const std::vector<double>& t_grid, const ComparisonFn& beta, const ComparisonFn& mu,
                              const NormSpec& z, const CertificateOptions& options) {
  certify_beta(beta, options.class_options);
  require_claim(mu, {ComparisonClass::K, ComparisonClass::KInfinity}, "mu");
  certify(mu, options.class_options, "mu");
  return run_certificate(model, x0, input_at, t_grid, options.slack, [&](const Input& u, double t) {
    return beta(t) + mu(z_norm(z, norm_profile(u, t)).value);
  });
}

CertificateReport verify_siiss(const SystemModel& model, const StateFn& x0, const InputAt& input_at,
                               const std::vector<double>& t_grid, const ComparisonFn& beta,
                               const ComparisonFn& theta, const ComparisonFn& mu, const CertificateOptions& options) {
  certify_beta(beta, options.class_options);
  require_claim(theta, {ComparisonClass::KInfinity}, "theta");
  certify(theta, options.class_options, "theta");
  require_claim(mu, {ComparisonClass::K, ComparisonClass::KInfinity}, "mu");
  certify(mu, options.class_options, "mu");
  return run_certificate(model, x0, input_at, t_grid, options.slack, [&](const Input& u, double t) {
    const double inner = integrate_map(norm_profile(u, t), mu.fn, 0.0, t);
    return beta(t) + theta(inner);
  });
}

std::vector<ThetaRow> estimate_theta(const SystemModel& model, const YoungFunction& phi1, std::vector<double> alphas,
                                     const std::vector<ThetaProbe>& probes) {
  if (probes.empty()) throw DomainError("estimate_theta: empty probe family");
  for (double a : alphas) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("estimate_theta: alphas must be finite and >= 0");
  }
  std::sort(alphas.begin(), alphas.end());

  // Unscaled state norm and norm profile per probe; both scale linearly.
  struct Prepared {
    const ThetaProbe* probe;
    PiecewiseFn profile;
    double state = 0.0;
  };
  std::vector<Prepared> prepared;
  for (const auto& p : probes) {
    PiecewiseFn profile = norm_profile(p.input, p.t);
    if (profile.is_zero()) continue;
    const double state = state_norm(mild_solution(model, zero_state(model), p.input, p.t));
    prepared.push_back({&p, std::move(profile), state});
  }

  std::vector<ThetaRow> rows;
  double running = 0.0;
  std::string witness;
  for (double alpha : alphas) {
    if (alpha > 0.0) {
      for (const auto& p : prepared) {
        // scale 1/k with int Phi1(|profile| / k) <= alpha
        const double k = luxemburg_level(phi1, p.profile, alpha).k_hi;
        const double value = p.state / k;
        if (value > running) {
          running = value;
          witness = p.probe->name;
        }
      }
    }
    rows.push_back({alpha, running, witness});
  }
  return rows;
}

}  // namespace oiss
