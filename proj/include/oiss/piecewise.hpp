#pragma once

#include <array>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "oiss/csv.hpp"

namespace oiss {

class YoungFunction;

// Polynomial of degree <= 3 in a local variable, c[k] the coefficient of y^k.
struct Cubic {
  std::array<double, 4> c{};

  static Cubic constant(double v) { return Cubic{{v, 0.0, 0.0, 0.0}}; }

  // Highest k with c[k] != 0; -1 for the zero polynomial.
  int degree() const;
  double operator()(double y) const { return ((c[3] * y + c[2]) * y + c[1]) * y + c[0]; }
  // q(y) = p(y + delta)
  Cubic shifted(double delta) const;
  // q(y) = p(scale * y)
  Cubic dilated(double scale) const;
  // q(y) = p(-y)
  Cubic reflected() const;
  Cubic derivative() const;
  // int_0^y p
  double antiderivative(double y) const;
};

// Real function on [0, inf) made of polynomial pieces on [b_i, b_{i+1}),
// zero on [0, b_0) and constant (`tail`) on [b_m, inf). Piece i is expressed in
// the local variable x - b_i. Immutable value type.
class PiecewiseFn {
 public:
  // The zero function.
  PiecewiseFn() : breakpoints_{0.0} {}
  // Throws DomainError unless breakpoints are finite, >= 0 and strictly
  // increasing with exactly one piece per interval.
  PiecewiseFn(std::vector<double> breakpoints, std::vector<Cubic> pieces, double tail = 0.0);

  static PiecewiseFn constant(double value) { return PiecewiseFn({0.0}, {}, value); }
  // value on [a, b), zero elsewhere.
  static PiecewiseFn indicator(double a, double b, double value = 1.0);
  // values[i] on [breakpoints[i], breakpoints[i+1]), `tail` after the last breakpoint.
  static PiecewiseFn step(std::vector<double> breakpoints, const std::vector<double>& values, double tail = 0.0);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Cubic>& pieces() const { return pieces_; }
  double tail() const { return tail_; }
  std::size_t size() const { return pieces_.size(); }

  // Pieces are closed on the left, open on the right.
  double operator()(double x) const;

  int max_degree() const;
  bool piecewise_constant() const { return max_degree() <= 0; }
  bool zero_tail() const { return tail_ == 0.0; }
  // Last breakpoint: everything beyond it is the tail.
  double support_end() const { return breakpoints_.back(); }
  bool is_zero() const;

  // Index of the piece containing x, or -1 before b_0 / size() in the tail.
  std::ptrdiff_t locate(double x) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<Cubic> pieces_;
  double tail_ = 0.0;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Exact int_a^b f. b may be +inf when the tail is zero; throws
// DivergentIntegralError otherwise.
double integrate(const PiecewiseFn& f, double a, double b = kInfinity);

// Exact int_a^b |f| (sign changes of each cubic located to machine precision).
double integrate_abs(const PiecewiseFn& f, double a, double b = kInfinity);

// int_a^b fn(f(x)) dx. Exact for constant pieces, adaptive quadrature otherwise.
double integrate_map(const PiecewiseFn& f, const std::function<double(double)>& fn, double a,
                     double b = kInfinity);

// sup of |f| over [a, b).
double max_abs(const PiecewiseFn& f, double a = 0.0, double b = kInfinity);

// (T(t) f)(x) = f(x + t). Breakpoints move exactly; the piece straddling the
// origin is re-based.
PiecewiseFn shift_left(const PiecewiseFn& f, double t);

// x -> f(x + alpha) - f(x + beta), 0 <= alpha <= beta. Where both arguments
// fall in the same piece the divided-difference form is used, so the
// constant terms never cancel.
PiecewiseFn shift_difference(const PiecewiseFn& f, double alpha, double beta);

// x -> f(scale * x + offset) on [0, inf), scale > 0. Arguments below zero read 0.
PiecewiseFn compose_affine(const PiecewiseFn& f, double scale, double offset);

// f * chi_[a, b).
PiecewiseFn restrict_to(const PiecewiseFn& f, double a, double b = kInfinity);

// x -> f(horizon - x) on [0, horizon), zero beyond.
PiecewiseFn reflect(const PiecewiseFn& f, double horizon);

// x -> Phi(|f(x)|); f must be piecewise constant.
PiecewiseFn compose_young(const YoungFunction& phi, const PiecewiseFn& f);

// Exact product; throws UnsupportedDegreeError if a merged piece exceeds degree 3.
PiecewiseFn multiply(const PiecewiseFn& f, const PiecewiseFn& g);

// sum_i weights[i] * fs[i] over the merged breakpoint set.
PiecewiseFn linear_combination(std::span<const PiecewiseFn> fs, std::span<const double> weights);
PiecewiseFn add(const PiecewiseFn& f, const PiecewiseFn& g);
PiecewiseFn subtract(const PiecewiseFn& f, const PiecewiseFn& g);
PiecewiseFn scale(const PiecewiseFn& f, double c);

// Classical derivative piece by piece (jumps at breakpoints are dropped).
PiecewiseFn derivative(const PiecewiseFn& f);

// W(x) = int_0^x f. Needs a zero tail and degree <= 2; W has a constant tail.
PiecewiseFn antiderivative(const PiecewiseFn& f);

// Rows `b,c0,c1,c2,c3`, one per piece, then a tail row `b_m,tail,0,0,0`.
std::string to_csv(const PiecewiseFn& f);
PiecewiseFn from_csv(const csv::Table& table);
PiecewiseFn read_piecewise(const std::string& path);

}  // namespace oiss
