#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "oiss/piecewise.hpp"

namespace oiss {

// X = U = L1(0, inf), B = I, (T(t) f)(s) = f(t + s). Generator Af = f'.
struct TranslationL1 {};

// x' = diag(lambda) x + b u with scalar input, truncated to N = lambda.size() modes.
struct Diagonal {
  std::vector<double> lambda;
  std::vector<double> b;

  // lambda_k = -1/k, b_k = coefficient for k = 1..n.
  static Diagonal harmonic(std::size_t n, double coefficient = 1.0);
};

// x' = lambda x + b u.
struct ScalarODE {
  double lambda = 0.0;
  double b = 1.0;
};

using SystemModel = std::variant<TranslationL1, Diagonal, ScalarODE>;

// `translation`, `scalar:LAMBDA:B`, `diagonal:<path>` (CSV with columns lambda,b).
SystemModel parse_model(std::string_view spec);
std::string model_name(const SystemModel& model);
// Throws DomainError when an eigenvalue is positive or the model is empty.
void validate_model(const SystemModel& model);

using Sequence = std::vector<double>;
// PiecewiseFn for the translation model, a finite sequence otherwise
// (length 1 for the scalar model).
using StateFn = std::variant<PiecewiseFn, Sequence>;

StateFn zero_state(const SystemModel& model);
// L1 norm for functions, l1 norm for sequences.
double state_norm(const StateFn& x);
StateFn state_difference(const StateFn& x, const StateFn& y);

struct TruncatedState {
  Sequence head;
  double tail_mass = 0.0;  // l1 mass of the dropped coefficients
};
TruncatedState truncate_state(const Sequence& full, std::size_t n);

// ---- inputs --------------------------------------------------------------

struct ZeroInput {};

// Scalar input s -> value(s) for the scalar and diagonal models. Must be
// piecewise constant; defined on all of [0, inf).
struct ScalarSignal {
  PiecewiseFn value;
};

// u(s) = values[i] on [times[i], times[i+1]), for the translation model.
// Defined on [times.front(), times.back()).
struct StateSegments {
  std::vector<double> times;
  std::vector<PiecewiseFn> values;
};

// u(s)(r) = g(r) chi_[s, inf)(r) u0(s) with g = -h'. h must have a zero tail,
// so that int_s^inf g = h(s).
struct SeparableInput {
  PiecewiseFn u0;
  PiecewiseFn h;
  PiecewiseFn g;
};

// s -> base(horizon - s) on [0, horizon].
struct ReversedSeparable {
  SeparableInput base;
  double horizon = 0.0;
};

// Arbitrary translation input known only through samples; handled by
// composite Gauss quadrature in s. Defined on [0, horizon].
struct SampledInput {
  std::function<PiecewiseFn(double)> at;
  double horizon = 0.0;
};

using Input = std::variant<ZeroInput, ScalarSignal, StateSegments, SeparableInput, ReversedSeparable, SampledInput>;

// s -> u(horizon - s) on [0, horizon].
Input reverse_in_time(const Input& u, double horizon);

// s -> ||u(s)||_U on [0, t), zero afterwards. Throws InputDomainError for
// sampled inputs and when u is not defined on [0, t).
PiecewiseFn norm_profile(const Input& u, double t);

// ---- dynamics ------------------------------------------------------------

StateFn apply_semigroup(const SystemModel& model, double t, const StateFn& x);

struct QuadratureInfo {
  std::size_t panels = 0;  // 0 when the result is exact
  bool converged = true;
};

// T(t) x0 + int_0^t T(t - s) B u(s) ds.
StateFn mild_solution(const SystemModel& model, const StateFn& x0, const Input& u, double t,
                      QuadratureInfo* info = nullptr);

// Phi_t(u) = int_0^t T(s) B u(s) ds.
StateFn input_to_state_map(const SystemModel& model, const Input& u, double t, QuadratureInfo* info = nullptr);

struct StabilityReport {
  std::vector<double> times;
  std::vector<double> norms;  // ||T(t) x||
  bool monotone = true;       // nonincreasing along the grid
  bool below_threshold = false;
  double threshold = 0.0;
};

StabilityReport strong_stability_probe(const SystemModel& model, const StateFn& x, const std::vector<double>& t_grid,
                                       double threshold = 1e-8);

}  // namespace oiss
