#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "oiss/piecewise.hpp"
#include "oiss/young.hpp"

namespace oiss {

struct LpNorm {
  double p;
};
struct LinfNorm {};
struct LuxemburgNorm {
  YoungFunction phi;
};

// Which norm is taken of the scalar profile s -> ||u(s)||_U.
using NormSpec = std::variant<LpNorm, LinfNorm, LuxemburgNorm>;

// `l1`, `l2`, `lp:P`, `linf`, `luxemburg:<young spec>`.
NormSpec parse_norm_spec(std::string_view spec);
std::string norm_name(const NormSpec& spec);

inline constexpr double kDefaultLuxemburgTol = 1e-10;

struct NormResult {
  double value = 0.0;
  NormSpec kind = LinfNorm{};
  double certified_tolerance = 0.0;
  // For Luxemburg results modular(k_hi) <= 1 <= modular(k_lo); value = k_hi.
  double k_lo = 0.0;
  double k_hi = 0.0;
};

// int Phi(|f(x)| / k) dx. Exact when f is piecewise constant; polynomial pieces
// are integrated by adaptive quadrature. Throws DivergentIntegralError when f
// has a nonzero tail.
double modular(const YoungFunction& phi, const PiecewiseFn& f, double k);

// inf{k > 0 : modular(phi, f, k) <= 1} by bracketed bisection; `tol` is relative.
NormResult luxemburg_norm(const YoungFunction& phi, const PiecewiseFn& f, double tol = kDefaultLuxemburgTol);

// Same search for the level set modular(phi, f, k) <= level.
NormResult luxemburg_level(const YoungFunction& phi, const PiecewiseFn& f, double level,
                           double tol = kDefaultLuxemburgTol);

// p in [1, inf]; p = inf is the sup of |f| including the tail.
NormResult lp_norm(const PiecewiseFn& f, double p);

NormResult z_norm(const NormSpec& spec, const PiecewiseFn& f, double tol = kDefaultLuxemburgTol);

struct MeanConvergenceRow {
  double r = 0.0;
  std::vector<double> modulars;  // int Phi(r f_n), one per sequence member
  // First n from which every modular is at or below tol.
  std::optional<std::size_t> settles_at;
};

struct MeanConvergenceReport {
  std::vector<MeanConvergenceRow> rows;
  std::vector<double> luxemburg_norms;
  std::optional<std::size_t> norms_settle_at;

  bool mean_convergent() const;
  bool norm_convergent() const { return norms_settle_at.has_value(); }
};

// Values within a relative 1e-12 of tol count as having reached it.
MeanConvergenceReport mean_convergence_check(const YoungFunction& phi, const std::vector<PiecewiseFn>& fs,
                                             const std::vector<double>& rs, double tol);

}  // namespace oiss
