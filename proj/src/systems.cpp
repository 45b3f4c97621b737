#include "oiss/systems.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "oiss/csv.hpp"
#include "oiss/error.hpp"
#include "oiss/grid.hpp"
#include "oiss/quadrature.hpp"

namespace oiss {

Diagonal Diagonal::harmonic(std::size_t n, double coefficient) {
  Diagonal d;
  for (std::size_t k = 1; k <= n; ++k) {
    d.lambda.push_back(-1.0 / static_cast<double>(k));
    d.b.push_back(coefficient);
  }
  return d;
}

SystemModel parse_model(std::string_view spec) {
  spec = csv::trim(spec);
  if (spec == "translation") return TranslationL1{};
  if (spec.starts_with("scalar:")) {
    const auto parts = csv::split(spec.substr(7), ':');
    if (parts.size() != 2) throw ParseError("scalar model must be scalar:LAMBDA:B");
    SystemModel m = ScalarODE{csv::parse_double(parts[0]), csv::parse_double(parts[1])};
    validate_model(m);
    return m;
  }
  if (spec.starts_with("diagonal:")) {
    const auto table = csv::read_table(std::string(spec.substr(9)));
    if (table.header.size() != 2) throw ParseError("diagonal model file needs columns lambda,b");
    Diagonal d;
    for (const auto& row : table.rows) {
      d.lambda.push_back(row[0]);
      d.b.push_back(row[1]);
    }
    SystemModel m = std::move(d);
    validate_model(m);
    return m;
  }
  throw ParseError("unknown model '" + std::string(spec) + "' (expected translation, scalar:L:B, diagonal:PATH)");
}

std::string model_name(const SystemModel& model) {
  if (std::holds_alternative<TranslationL1>(model)) return "translation";
  if (const auto* s = std::get_if<ScalarODE>(&model)) return fmt::format("scalar:{}:{}", s->lambda, s->b);
  return fmt::format("diagonal[{}]", std::get<Diagonal>(model).lambda.size());
}

void validate_model(const SystemModel& model) {
  if (const auto* s = std::get_if<ScalarODE>(&model)) {
    if (!(s->lambda <= 0.0) || !std::isfinite(s->b)) throw DomainError("scalar model needs lambda <= 0 and finite b");
  } else if (const auto* d = std::get_if<Diagonal>(&model)) {
    if (d->lambda.empty()) throw DomainError("diagonal model needs at least one mode");
    if (d->lambda.size() != d->b.size()) throw DomainError("diagonal model: lambda and b differ in length");
    for (std::size_t k = 0; k < d->lambda.size(); ++k) {
      if (!(d->lambda[k] <= 0.0) || !std::isfinite(d->b[k])) {
        throw DomainError(fmt::format("diagonal model: mode {} has lambda = {}", k + 1, d->lambda[k]));
      }
    }
  }
}

StateFn zero_state(const SystemModel& model) {
  if (std::holds_alternative<TranslationL1>(model)) return PiecewiseFn{};
  if (std::holds_alternative<ScalarODE>(model)) return Sequence{0.0};
  return Sequence(std::get<Diagonal>(model).lambda.size(), 0.0);
}

double state_norm(const StateFn& x) {
  if (const auto* f = std::get_if<PiecewiseFn>(&x)) return integrate_abs(*f, 0.0);
  double sum = 0.0;
  for (double v : std::get<Sequence>(x)) sum += std::abs(v);
  return sum;
}

StateFn state_difference(const StateFn& x, const StateFn& y) {
  if (x.index() != y.index()) throw ModelStateMismatchError("state_difference: different state kinds");
  if (const auto* f = std::get_if<PiecewiseFn>(&x)) return subtract(*f, std::get<PiecewiseFn>(y));
  const auto& a = std::get<Sequence>(x);
  const auto& b = std::get<Sequence>(y);
  if (a.size() != b.size()) throw ModelStateMismatchError("state_difference: sequence lengths differ");
  Sequence d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

TruncatedState truncate_state(const Sequence& full, std::size_t n) {
  TruncatedState out;
  const std::size_t keep = std::min(n, full.size());
  out.head.assign(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(keep));
  for (std::size_t i = keep; i < full.size(); ++i) out.tail_mass += std::abs(full[i]);
  return out;
}

namespace {

const Sequence& sequence_state(const SystemModel& model, const StateFn& x) {
  const auto* seq = std::get_if<Sequence>(&x);
  if (seq == nullptr) throw ModelStateMismatchError(model_name(model) + " needs a sequence state");
  const std::size_t want = std::holds_alternative<ScalarODE>(model) ? 1 : std::get<Diagonal>(model).lambda.size();
  if (seq->size() != want) {
    throw ModelStateMismatchError(fmt::format("{} needs a state of length {}, got {}", model_name(model), want, seq->size()));
  }
  return *seq;
}

const PiecewiseFn& function_state(const StateFn& x) {
  const auto* f = std::get_if<PiecewiseFn>(&x);
  if (f == nullptr) throw ModelStateMismatchError("translation model needs a function state");
  if (!f->zero_tail()) throw ModelStateMismatchError("translation state must have a zero tail (element of L1)");
  return *f;
}

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError(fmt::format("time must be finite and >= 0, got {}", t));
}

// (lambda, b) pairs of a finite-dimensional model.
std::vector<std::pair<double, double>> modes(const SystemModel& model) {
  if (const auto* s = std::get_if<ScalarODE>(&model)) return {{s->lambda, s->b}};
  const auto& d = std::get<Diagonal>(model);
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k < d.lambda.size(); ++k) out.emplace_back(d.lambda[k], d.b[k]);
  return out;
}

// int_0^w e^(lambda y) dy
double exp_window(double lambda, double w) {
  if (lambda == 0.0) return w;
  return std::expm1(lambda * w) / lambda;
}

// Constant pieces of a scalar signal clipped to [0, t): (a, b, value).
struct Segment {
  double a, b, value;
};

std::vector<Segment> signal_segments(const PiecewiseFn& v, double t) {
  if (!v.piecewise_constant()) throw InputDomainError("scalar inputs must be piecewise constant in time");
  std::vector<Segment> out;
  const auto& bps = v.breakpoints();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::min(bps[i], t);
    const double b = std::min(bps[i + 1], t);
    if (b > a && v.pieces()[i].c[0] != 0.0) out.push_back({a, b, v.pieces()[i].c[0]});
  }
  if (v.tail() != 0.0 && t > bps.back()) out.push_back({bps.back(), t, v.tail()});
  return out;
}

const PiecewiseFn& scalar_signal(const SystemModel& model, const Input& u) {
  const auto* s = std::get_if<ScalarSignal>(&u);
  if (s == nullptr) throw ModelStateMismatchError(model_name(model) + " takes scalar inputs");
  return s->value;
}

void check_segments(const StateSegments& u, double t) {
  if (u.times.size() != u.values.size() + 1) throw InputDomainError("segment input needs one more time than values");
  require_increasing(u.times, "segment times");
  if (u.times.front() > 0.0 || u.times.back() < t) {
    throw InputDomainError(fmt::format("segment input is defined on [{}, {}), not on [0, {})", u.times.front(),
                                       u.times.back(), t));
  }
  for (const auto& v : u.values) {
    if (!v.zero_tail()) throw InputDomainError("segment values must lie in L1 (zero tail)");
  }
}

void check_separable(const SeparableInput& u) {
  if (!u.h.zero_tail()) throw InputDomainError("separable input needs h with a zero tail");
  if (!u.u0.piecewise_constant()) throw InputDomainError("separable input needs a piecewise constant u0");
}

PiecewiseFn sum_terms(const std::vector<PiecewiseFn>& fs, const std::vector<double>& ws) {
  if (fs.empty()) return PiecewiseFn{};
  return linear_combination(fs, ws);
}

// int_lo^hi T(tau - sigma) u(sigma) dsigma for a separable u, tau >= hi.
// On a piece [a, b) of u0 with value v:
//   v [chi_(2a-tau, 2b-tau) h((r+tau)/2) + chi_[2b-tau, inf) h(r+tau-b) - chi_(2a-tau, inf) h(r+tau-a)].
PiecewiseFn separable_mild(const SeparableInput& u, double tau, double lo, double hi) {
  std::vector<PiecewiseFn> fs;
  std::vector<double> ws;
  const auto& bps = u.u0.breakpoints();
  const PiecewiseFn half = compose_affine(u.h, 0.5, 0.5 * tau);
  for (std::size_t i = 0; i < u.u0.size(); ++i) {
    const double a = std::max(bps[i], lo);
    const double b = std::min(bps[i + 1], hi);
    const double v = u.u0.pieces()[i].c[0];
    if (!(b > a) || v == 0.0) continue;
    const double ra = std::max(0.0, 2.0 * a - tau);
    const double rb = std::max(0.0, 2.0 * b - tau);
    if (rb > ra) {
      fs.push_back(restrict_to(half, ra, rb));
      ws.push_back(v);
      fs.push_back(restrict_to(shift_left(u.h, tau - a), ra, rb));
      ws.push_back(-v);
    }
    fs.push_back(restrict_to(shift_difference(u.h, tau - b, tau - a), rb));
    ws.push_back(v);
  }
  return sum_terms(fs, ws);
}

// int_lo^hi T(sigma + c) u(sigma) dsigma for a separable u, sigma + c >= 0 on [lo, hi].
// On a piece [a, b) with value v: chi_[-c, inf)(r) v (h(r + c + a) - h(r + c + b)).
PiecewiseFn separable_map(const SeparableInput& u, double c, double lo, double hi) {
  std::vector<PiecewiseFn> fs;
  std::vector<double> ws;
  const auto& bps = u.u0.breakpoints();
  const double from = std::max(0.0, -c);
  for (std::size_t i = 0; i < u.u0.size(); ++i) {
    const double a = std::max(bps[i], lo);
    const double b = std::min(bps[i + 1], hi);
    const double v = u.u0.pieces()[i].c[0];
    if (!(b > a) || v == 0.0) continue;
    fs.push_back(shift_difference(u.h, c + a, c + b));
    ws.push_back(v);
  }
  PiecewiseFn sum = sum_terms(fs, ws);
  return from > 0.0 ? restrict_to(sum, from) : sum;
}

// Segment input: with W' = w, int_{sa}^{sb} T(t - s) w ds = W(r + t - sa) - W(r + t - sb)
// and int_{sa}^{sb} T(s) w ds = W(r + sb) - W(r + sa).
PiecewiseFn segments_response(const StateSegments& u, double t, bool mild) {
  std::vector<PiecewiseFn> fs;
  std::vector<double> ws;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const double a = std::max(u.times[i], 0.0);
    const double b = std::min(u.times[i + 1], t);
    if (!(b > a) || u.values[i].is_zero()) continue;
    const PiecewiseFn w = antiderivative(u.values[i]);
    fs.push_back(mild ? shift_difference(w, t - b, t - a) : shift_difference(w, a, b));
    ws.push_back(-1.0);
  }
  return sum_terms(fs, ws);
}

constexpr int kFirstPanels = 64;
constexpr int kMaxPanels = 1024;
constexpr double kQuadratureRelTol = 1e-9;

// Composite Gauss in s over [0, t], product form: each panel is cut into cells
// of length equal to the node weights, the sample at the node is held on its
// cell and the semigroup is integrated over the cell exactly. Inputs that are
// constant in s are then reproduced exactly; samples of degree 3 fall back to
// the point rule.
PiecewiseFn sampled_response(const SampledInput& u, double t, bool mild, QuadratureInfo* info) {
  if (t > u.horizon) throw InputDomainError(fmt::format("sampled input is defined on [0, {}], not up to {}", u.horizon, t));
  if (t == 0.0) return PiecewiseFn{};
  const auto rule = quad::gauss_legendre8();
  auto evaluate = [&](int panels) {
    std::vector<PiecewiseFn> fs;
    std::vector<double> ws;
    const double width = t / panels;
    for (int p = 0; p < panels; ++p) {
      const double start = p * width;
      double ca = start;
      for (int k = 0; k < rule.size; ++k) {
        const double s = start + 0.5 * width * (1.0 + rule.nodes[k]);
        const double cb = k + 1 == rule.size ? start + width : ca + 0.5 * width * rule.weights[k];
        const PiecewiseFn value = u.at(s);
        if (!value.zero_tail()) throw InputDomainError("sampled input values must lie in L1 (zero tail)");
        if (value.max_degree() <= 2) {
          const PiecewiseFn w = antiderivative(value);
          fs.push_back(mild ? shift_difference(w, t - cb, t - ca) : shift_difference(w, ca, cb));
          ws.push_back(-1.0);
        } else {
          fs.push_back(shift_left(value, mild ? t - s : s));
          ws.push_back(0.5 * width * rule.weights[k]);
        }
        ca = cb;
      }
    }
    return sum_terms(fs, ws);
  };
  int panels = kFirstPanels;
  PiecewiseFn coarse = evaluate(panels);
  bool converged = false;
  while (panels < kMaxPanels) {
    panels *= 2;
    PiecewiseFn fine = evaluate(panels);
    const double gap = integrate_abs(subtract(fine, coarse), 0.0);
    const double size = integrate_abs(fine, 0.0);
    coarse = std::move(fine);
    if (gap <= kQuadratureRelTol * size || gap == 0.0) {
      converged = true;
      break;
    }
  }
  if (info != nullptr) {
    info->panels = static_cast<std::size_t>(panels);
    info->converged = converged;
  }
  return coarse;
}

PiecewiseFn translation_response(const Input& u, double t, bool mild, QuadratureInfo* info) {
  return std::visit(
      [&](const auto& in) -> PiecewiseFn {
        using T = std::decay_t<decltype(in)>;
        if constexpr (std::is_same_v<T, ZeroInput>) {
          return PiecewiseFn{};
        } else if constexpr (std::is_same_v<T, ScalarSignal>) {
          throw ModelStateMismatchError("translation model takes L1-valued inputs, not scalar signals");
        } else if constexpr (std::is_same_v<T, StateSegments>) {
          check_segments(in, t);
          return segments_response(in, t, mild);
        } else if constexpr (std::is_same_v<T, SeparableInput>) {
          check_separable(in);
          return mild ? separable_mild(in, t, 0.0, t) : separable_map(in, 0.0, 0.0, t);
        } else if constexpr (std::is_same_v<T, ReversedSeparable>) {
          check_separable(in.base);
          const double h = in.horizon;
          if (t > h) throw InputDomainError(fmt::format("reversed input is defined on [0, {}], not up to {}", h, t));
          return mild ? separable_map(in.base, t - h, h - t, h) : separable_mild(in.base, h, h - t, h);
        } else {
          return sampled_response(in, t, mild, info);
        }
      },
      u);
}

Sequence finite_response(const SystemModel& model, const Input& u, double t, bool mild) {
  const auto ms = modes(model);
  Sequence out(ms.size(), 0.0);
  if (std::holds_alternative<ZeroInput>(u)) return out;
  const auto segments = signal_segments(scalar_signal(model, u), t);
  for (std::size_t k = 0; k < ms.size(); ++k) {
    const auto [lambda, b] = ms[k];
    double acc = 0.0;
    for (const auto& seg : segments) {
      // mild: int_a^b e^(lambda (t - s)) ds; map: int_a^b e^(lambda s) ds
      const double anchor = mild ? std::exp(lambda * (t - seg.b)) : std::exp(lambda * seg.a);
      acc += seg.value * anchor * exp_window(lambda, seg.b - seg.a);
    }
    out[k] = b * acc;
  }
  return out;
}

}  // namespace

Input reverse_in_time(const Input& u, double horizon) {
  require_time(horizon);
  return std::visit(
      [&](const auto& in) -> Input {
        using T = std::decay_t<decltype(in)>;
        if constexpr (std::is_same_v<T, ZeroInput>) {
          return in;
        } else if constexpr (std::is_same_v<T, ScalarSignal>) {
          return ScalarSignal{reflect(in.value, horizon)};
        } else if constexpr (std::is_same_v<T, StateSegments>) {
          check_segments(in, horizon);
          StateSegments out;
          out.times.push_back(0.0);
          for (std::size_t i = in.values.size(); i-- > 0;) {
            const double a = std::max(in.times[i], 0.0);
            const double b = std::min(in.times[i + 1], horizon);
            if (!(b > a)) continue;
            out.times.push_back(horizon - a);
            out.values.push_back(in.values[i]);
          }
          if (out.values.empty()) return ZeroInput{};
          return out;
        } else if constexpr (std::is_same_v<T, SeparableInput>) {
          return ReversedSeparable{in, horizon};
        } else if constexpr (std::is_same_v<T, ReversedSeparable>) {
          if (horizon != in.horizon) throw InputDomainError("reversing a reversed input needs the same horizon");
          return in.base;
        } else {
          if (horizon > in.horizon) throw InputDomainError("sampled input does not cover the reversal horizon");
          auto at = in.at;
          return SampledInput{[at, horizon](double s) { return at(horizon - s); }, horizon};
        }
      },
      u);
}

PiecewiseFn norm_profile(const Input& u, double t) {
  require_time(t);
  return std::visit(
      [&](const auto& in) -> PiecewiseFn {
        using T = std::decay_t<decltype(in)>;
        if constexpr (std::is_same_v<T, ZeroInput>) {
          return PiecewiseFn{};
        } else if constexpr (std::is_same_v<T, ScalarSignal>) {
          std::vector<double> bps{0.0};
          std::vector<double> values;
          for (const auto& seg : signal_segments(in.value, t)) {
            if (seg.a > bps.back()) {
              values.push_back(0.0);
              bps.push_back(seg.a);
            }
            values.push_back(std::abs(seg.value));
            bps.push_back(seg.b);
          }
          return PiecewiseFn::step(std::move(bps), values);
        } else if constexpr (std::is_same_v<T, StateSegments>) {
          check_segments(in, t);
          std::vector<double> bps{0.0};
          std::vector<double> values;
          for (std::size_t i = 0; i < in.values.size(); ++i) {
            const double a = std::max(in.times[i], 0.0);
            const double b = std::min(in.times[i + 1], t);
            if (!(b > a)) continue;
            values.push_back(integrate_abs(in.values[i], 0.0));
            bps.push_back(b);
          }
          return PiecewiseFn::step(std::move(bps), values);
        } else if constexpr (std::is_same_v<T, SeparableInput>) {
          check_separable(in);
          // ||u(s)||_X = |u0(s)| int_s^inf g = |u0(s)| h(s)
          return restrict_to(multiply(in.u0, in.h), 0.0, t);
        } else if constexpr (std::is_same_v<T, ReversedSeparable>) {
          check_separable(in.base);
          if (t > in.horizon) throw InputDomainError("reversed input is not defined past its horizon");
          const PiecewiseFn base = multiply(in.base.u0, in.base.h);
          return restrict_to(reflect(base, in.horizon), 0.0, t);
        } else {
          throw InputDomainError("sampled inputs have no exact norm profile");
        }
      },
      u);
}

StateFn apply_semigroup(const SystemModel& model, double t, const StateFn& x) {
  require_time(t);
  if (std::holds_alternative<TranslationL1>(model)) return shift_left(function_state(x), t);
  const auto& seq = sequence_state(model, x);
  const auto ms = modes(model);
  Sequence out(seq.size());
  for (std::size_t k = 0; k < seq.size(); ++k) out[k] = t == 0.0 ? seq[k] : std::exp(ms[k].first * t) * seq[k];
  return out;
}

StateFn mild_solution(const SystemModel& model, const StateFn& x0, const Input& u, double t, QuadratureInfo* info) {
  require_time(t);
  if (info != nullptr) *info = QuadratureInfo{};
  const StateFn free = apply_semigroup(model, t, x0);
  if (std::holds_alternative<TranslationL1>(model)) {
    const PiecewiseFn forced = translation_response(u, t, true, info);
    return add(std::get<PiecewiseFn>(free), forced);
  }
  Sequence out = std::get<Sequence>(free);
  const Sequence forced = finite_response(model, u, t, true);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += forced[k];
  return out;
}

StateFn input_to_state_map(const SystemModel& model, const Input& u, double t, QuadratureInfo* info) {
  require_time(t);
  if (info != nullptr) *info = QuadratureInfo{};
  if (std::holds_alternative<TranslationL1>(model)) return translation_response(u, t, false, info);
  return finite_response(model, u, t, false);
}

StabilityReport strong_stability_probe(const SystemModel& model, const StateFn& x, const std::vector<double>& t_grid,
                                       double threshold) {
  if (t_grid.empty()) throw DomainError("strong_stability_probe: empty time grid");
  require_increasing(t_grid, "stability grid");
  StabilityReport report;
  report.threshold = threshold;
  report.times = t_grid;
  for (double t : t_grid) {
    const double n = state_norm(apply_semigroup(model, t, x));
    if (!report.norms.empty() && n > report.norms.back()) report.monotone = false;
    report.norms.push_back(n);
  }
  report.below_threshold = report.norms.back() < threshold;
  return report;
}

}  // namespace oiss
