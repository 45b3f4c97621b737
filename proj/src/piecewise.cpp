#include "oiss/piecewise.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "oiss/error.hpp"
#include "oiss/quadrature.hpp"
#include "oiss/young.hpp"

namespace oiss {

int Cubic::degree() const {
  for (int k = 3; k >= 0; --k) {
    if (c[k] != 0.0) return k;
  }
  return -1;
}

Cubic Cubic::shifted(double delta) const {
  if (delta == 0.0) return *this;
  const double d = delta;
  return Cubic{{((c[3] * d + c[2]) * d + c[1]) * d + c[0],
                (3.0 * c[3] * d + 2.0 * c[2]) * d + c[1],
                3.0 * c[3] * d + c[2],
                c[3]}};
}

Cubic Cubic::dilated(double scale) const {
  if (scale == 1.0) return *this;
  return Cubic{{c[0], c[1] * scale, c[2] * scale * scale, c[3] * scale * scale * scale}};
}

Cubic Cubic::reflected() const { return Cubic{{c[0], -c[1], c[2], -c[3]}}; }

Cubic Cubic::derivative() const { return Cubic{{c[1], 2.0 * c[2], 3.0 * c[3], 0.0}}; }

double Cubic::antiderivative(double y) const {
  return (((c[3] / 4.0 * y + c[2] / 3.0) * y + c[1] / 2.0) * y + c[0]) * y;
}

namespace {

constexpr double kMergeTol = 1e-12;

// Collects pieces by start point; a piece ends where the next one starts.
class Builder {
 public:
  void push(double start, const Cubic& poly) {
    if (!starts_.empty() && !(start > starts_.back())) {
      polys_.back() = poly;  // previous piece had zero width
      return;
    }
    starts_.push_back(start);
    polys_.push_back(poly);
  }

  PiecewiseFn finish(double end, double tail) {
    while (!starts_.empty() && !(end > starts_.back())) {
      starts_.pop_back();
      polys_.pop_back();
    }
    if (starts_.empty()) return PiecewiseFn({std::max(end, 0.0)}, {}, tail);
    starts_.push_back(end);
    return PiecewiseFn(std::move(starts_), std::move(polys_), tail);
  }

  bool empty() const { return starts_.empty(); }

 private:
  std::vector<double> starts_;
  std::vector<Cubic> polys_;
};

// Walks one function's pieces along increasing probe points.
class Cursor {
 public:
  explicit Cursor(const PiecewiseFn& f) : f_(f) {}

  // Polynomial of f on an interval starting at `start` and containing `probe`,
  // expressed in the local variable x - start.
  Cubic at(double start, double probe) {
    const auto& b = f_.breakpoints();
    while (next_ < b.size() && b[next_] <= probe) ++next_;
    if (next_ == 0) return Cubic{};
    if (next_ == b.size()) return Cubic::constant(f_.tail());
    const std::size_t i = next_ - 1;
    return f_.pieces()[i].shifted(start - b[i]);
  }

 private:
  const PiecewiseFn& f_;
  std::size_t next_ = 0;
};

std::vector<double> merged_breakpoints(std::span<const PiecewiseFn> fs) {
  std::vector<double> all;
  for (const auto& f : fs) all.insert(all.end(), f.breakpoints().begin(), f.breakpoints().end());
  std::sort(all.begin(), all.end());
  std::vector<double> merged;
  for (double b : all) {
    if (merged.empty() || b - merged.back() > kMergeTol * std::max(1.0, std::abs(b))) merged.push_back(b);
  }
  return merged;
}

Cubic product(const Cubic& p, const Cubic& q) {
  std::array<double, 7> r{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) r[i + j] += p.c[i] * q.c[j];
  }
  const int dp = p.degree();
  const int dq = q.degree();
  if (dp >= 0 && dq >= 0 && dp + dq > 3) {
    throw UnsupportedDegreeError(fmt::format("product of degree {} and {} pieces exceeds degree 3", dp, dq));
  }
  return Cubic{{r[0], r[1], r[2], r[3]}};
}

// Roots of c0 + c1 y + c2 y^2 strictly inside (lo, hi).
void quadratic_roots_in(double c0, double c1, double c2, double lo, double hi, std::vector<double>& out) {
  auto keep = [&](double y) {
    if (y > lo && y < hi) out.push_back(y);
  };
  if (c2 == 0.0) {
    if (c1 != 0.0) keep(-c0 / c1);
    return;
  }
  const double disc = c1 * c1 - 4.0 * c2 * c0;
  if (disc < 0.0) return;
  const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
  if (q != 0.0) {
    keep(q / c2);
    keep(c0 / q);
  } else {
    keep(0.0);
  }
}

// Split [lo, hi] so that p keeps one sign on every part.
std::vector<double> sign_splits(const Cubic& p, double lo, double hi) {
  std::vector<double> pts{lo, hi};
  if (p.degree() >= 2) quadratic_roots_in(p.c[1], 2.0 * p.c[2], 3.0 * p.c[3], lo, hi, pts);
  std::sort(pts.begin(), pts.end());
  std::vector<double> out{pts.front()};
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double u = pts[i];
    double v = pts[i + 1];
    double pu = p(u);
    const double pv = p(v);
    if ((pu < 0.0 && pv > 0.0) || (pu > 0.0 && pv < 0.0)) {
      // p is monotone on [u, v]: bisect to adjacent doubles.
      for (int it = 0; it < 200; ++it) {
        const double m = u + 0.5 * (v - u);
        if (m <= u || m >= v) break;
        const double pm = p(m);
        if ((pm < 0.0) == (pu < 0.0) && pm != 0.0) {
          u = m;
          pu = pm;
        } else {
          v = m;
        }
      }
      out.push_back(v);
    }
    out.push_back(pts[i + 1]);
  }
  return out;
}

void require_range(double a, double b, const char* what) {
  if (!(a >= 0.0) || std::isnan(b) || b < a || !std::isfinite(a)) {
    throw DomainError(fmt::format("{}: need 0 <= a <= b, got a = {}, b = {}", what, a, b));
  }
}

// Index of the first piece whose right end exceeds a.
std::size_t first_piece_after(const PiecewiseFn& f, double a) {
  const auto& b = f.breakpoints();
  const auto it = std::upper_bound(b.begin() + 1, b.end(), a);
  return static_cast<std::size_t>(it - (b.begin() + 1));
}

}  // namespace

PiecewiseFn::PiecewiseFn(std::vector<double> breakpoints, std::vector<Cubic> pieces, double tail)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces)), tail_(tail) {
  if (breakpoints_.empty()) throw DomainError("piecewise function needs at least one breakpoint");
  if (pieces_.size() + 1 != breakpoints_.size()) {
    throw DomainError(fmt::format("piecewise function: {} breakpoints for {} pieces", breakpoints_.size(), pieces_.size()));
  }
  if (!std::isfinite(tail_)) throw DomainError("piecewise function: tail must be finite");
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    const double b = breakpoints_[i];
    if (!std::isfinite(b) || b < 0.0) throw DomainError(fmt::format("piecewise function: breakpoint {} invalid", b));
    if (i > 0 && !(b > breakpoints_[i - 1])) throw DomainError("piecewise function: breakpoints must be strictly increasing");
  }
  for (const auto& p : pieces_) {
    for (double c : p.c) {
      if (!std::isfinite(c)) throw DomainError("piecewise function: non-finite coefficient");
    }
  }
}

PiecewiseFn PiecewiseFn::indicator(double a, double b, double value) {
  if (!(a >= 0.0) || !(b > a) || !std::isfinite(b)) throw DomainError(fmt::format("indicator needs 0 <= a < b < inf, got [{}, {})", a, b));
  return PiecewiseFn({a, b}, {Cubic::constant(value)}, 0.0);
}

PiecewiseFn PiecewiseFn::step(std::vector<double> breakpoints, const std::vector<double>& values, double tail) {
  std::vector<Cubic> pieces;
  pieces.reserve(values.size());
  for (double v : values) pieces.push_back(Cubic::constant(v));
  return PiecewiseFn(std::move(breakpoints), std::move(pieces), tail);
}

std::ptrdiff_t PiecewiseFn::locate(double x) const {
  if (x < breakpoints_.front()) return -1;
  if (x >= breakpoints_.back()) return static_cast<std::ptrdiff_t>(pieces_.size());
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  return (it - breakpoints_.begin()) - 1;
}

double PiecewiseFn::operator()(double x) const {
  const auto i = locate(x);
  if (i < 0) return 0.0;
  if (i == static_cast<std::ptrdiff_t>(pieces_.size())) return tail_;
  return pieces_[i](x - breakpoints_[i]);
}

int PiecewiseFn::max_degree() const {
  int d = tail_ != 0.0 ? 0 : -1;
  for (const auto& p : pieces_) d = std::max(d, p.degree());
  return d;
}

bool PiecewiseFn::is_zero() const { return max_degree() < 0; }

double integrate(const PiecewiseFn& f, double a, double b) {
  require_range(a, b, "integrate");
  if (std::isinf(b) && !f.zero_tail()) throw DivergentIntegralError("integral to infinity of a function with nonzero tail");
  const auto& bp = f.breakpoints();
  double total = 0.0;
  for (std::size_t i = first_piece_after(f, a); i < f.size() && bp[i] < b; ++i) {
    const double lo = std::max(a, bp[i]) - bp[i];
    const double hi = std::min(b, bp[i + 1]) - bp[i];
    if (hi > lo) total += f.pieces()[i].antiderivative(hi) - f.pieces()[i].antiderivative(lo);
  }
  if (b > f.support_end() && f.tail() != 0.0) total += f.tail() * (b - std::max(a, f.support_end()));
  return total;
}

double integrate_abs(const PiecewiseFn& f, double a, double b) {
  require_range(a, b, "integrate_abs");
  if (std::isinf(b) && !f.zero_tail()) throw DivergentIntegralError("integral to infinity of a function with nonzero tail");
  const auto& bp = f.breakpoints();
  double total = 0.0;
  for (std::size_t i = first_piece_after(f, a); i < f.size() && bp[i] < b; ++i) {
    const double lo = std::max(a, bp[i]) - bp[i];
    const double hi = std::min(b, bp[i + 1]) - bp[i];
    if (!(hi > lo)) continue;
    const Cubic& p = f.pieces()[i];
    if (p.degree() <= 0) {
      total += std::abs(p.c[0]) * (hi - lo);
      continue;
    }
    const auto pts = sign_splits(p, lo, hi);
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      total += std::abs(p.antiderivative(pts[k + 1]) - p.antiderivative(pts[k]));
    }
  }
  if (b > f.support_end() && f.tail() != 0.0) total += std::abs(f.tail()) * (b - std::max(a, f.support_end()));
  return total;
}

double integrate_map(const PiecewiseFn& f, const std::function<double(double)>& fn, double a, double b) {
  require_range(a, b, "integrate_map");
  const auto& bp = f.breakpoints();
  double total = 0.0;
  const double zero_value = fn(0.0);
  if (zero_value != 0.0 && a < bp.front()) total += zero_value * (std::min(b, bp.front()) - a);
  for (std::size_t i = first_piece_after(f, a); i < f.size() && bp[i] < b; ++i) {
    const double lo = std::max(a, bp[i]) - bp[i];
    const double hi = std::min(b, bp[i + 1]) - bp[i];
    if (!(hi > lo)) continue;
    const Cubic& p = f.pieces()[i];
    if (p.degree() <= 0) {
      total += fn(p.c[0]) * (hi - lo);
    } else {
      total += quad::adaptive([&](double y) { return fn(p(y)); }, lo, hi, 1e-15, 1e-12);
    }
  }
  if (b > f.support_end()) {
    const double tail_value = fn(f.tail());
    if (tail_value != 0.0) {
      if (std::isinf(b)) throw DivergentIntegralError("integrand has a nonzero tail");
      total += tail_value * (b - std::max(a, f.support_end()));
    }
  }
  return total;
}

double max_abs(const PiecewiseFn& f, double a, double b) {
  require_range(a, b, "max_abs");
  const auto& bp = f.breakpoints();
  double best = 0.0;
  for (std::size_t i = first_piece_after(f, a); i < f.size() && bp[i] < b; ++i) {
    const double lo = std::max(a, bp[i]) - bp[i];
    const double hi = std::min(b, bp[i + 1]) - bp[i];
    if (!(hi > lo)) continue;
    const Cubic& p = f.pieces()[i];
    std::vector<double> pts{lo, hi};
    if (p.degree() >= 2) quadratic_roots_in(p.c[1], 2.0 * p.c[2], 3.0 * p.c[3], lo, hi, pts);
    for (double y : pts) best = std::max(best, std::abs(p(y)));
  }
  if (b > f.support_end()) best = std::max(best, std::abs(f.tail()));
  return best;
}

PiecewiseFn compose_affine(const PiecewiseFn& f, double scale, double offset) {
  if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(offset)) {
    throw DomainError(fmt::format("compose_affine needs scale > 0 and finite offset, got {}, {}", scale, offset));
  }
  const auto& bp = f.breakpoints();
  auto image = [&](double b) { return (b - offset) / scale; };
  Builder out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double end = image(bp[i + 1]);
    if (!(end > 0.0)) continue;
    const double start = image(bp[i]);
    if (start > 0.0) {
      out.push(start, f.pieces()[i].dilated(scale));
    } else {
      // Piece straddles the origin: re-base at x = 0, argument offset - b_i.
      out.push(0.0, f.pieces()[i].shifted(offset - bp[i]).dilated(scale));
    }
  }
  const double end = image(f.support_end());
  if (out.empty()) return PiecewiseFn({std::max(end, 0.0)}, {}, f.tail());
  return out.finish(end, f.tail());
}

PiecewiseFn shift_left(const PiecewiseFn& f, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError(fmt::format("shift_left needs finite t >= 0, got {}", t));
  if (t == 0.0) return f;
  return compose_affine(f, 1.0, t);
}

PiecewiseFn shift_difference(const PiecewiseFn& f, double alpha, double beta) {
  if (!(alpha >= 0.0) || !(beta >= alpha) || !std::isfinite(beta)) {
    throw DomainError(fmt::format("shift_difference needs 0 <= alpha <= beta, got {}, {}", alpha, beta));
  }
  const double end = f.support_end() - alpha;
  if (alpha == beta || !(end > 0.0)) return PiecewiseFn{};
  std::vector<double> cuts{0.0};
  for (double b : f.breakpoints()) {
    if (b - alpha > 0.0) cuts.push_back(b - alpha);
    if (b - beta > 0.0) cuts.push_back(b - beta);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto& bp = f.breakpoints();
  const auto n = static_cast<std::ptrdiff_t>(f.size());
  auto poly_at = [&](std::ptrdiff_t i, double arg) {
    if (i < 0) return Cubic{};
    if (i == n) return Cubic::constant(f.tail());
    return f.pieces()[i].shifted(arg - bp[i]);
  };
  const double delta = beta - alpha;
  Builder out;
  for (std::size_t k = 0; k + 1 < cuts.size() && cuts[k] < end; ++k) {
    const double start = cuts[k];
    const double mid = start + 0.5 * (cuts[k + 1] - start);
    const auto ia = f.locate(mid + alpha);
    const auto ib = f.locate(mid + beta);
    if (ia == ib && ia >= 0 && ia < n) {
      // p(y + a) - p(y + b) = (a - b) [c1 + c2 (2y + a + b) + c3 (3y^2 + 3y (a + b) + a^2 + ab + b^2)]
      const auto& c = f.pieces()[ia].c;
      const double a = start + alpha - bp[ia];
      const double b = a + delta;
      out.push(start, Cubic{{-delta * (c[1] + c[2] * (a + b) + c[3] * (a * a + a * b + b * b)),
                             -delta * (2.0 * c[2] + 3.0 * c[3] * (a + b)), -delta * 3.0 * c[3], 0.0}});
    } else if (ia == ib) {
      out.push(start, Cubic{});
    } else {
      const Cubic pa = poly_at(ia, start + alpha);
      const Cubic pb = poly_at(ib, start + beta);
      Cubic d;
      for (int j = 0; j < 4; ++j) d.c[j] = pa.c[j] - pb.c[j];
      out.push(start, d);
    }
  }
  if (out.empty()) return PiecewiseFn{};
  return out.finish(end, 0.0);
}

PiecewiseFn restrict_to(const PiecewiseFn& f, double a, double b) {
  require_range(a, b, "restrict_to");
  if (!(b > a)) return PiecewiseFn{};
  const auto& bp = f.breakpoints();
  Builder out;
  for (std::size_t i = first_piece_after(f, a); i < f.size() && bp[i] < b; ++i) {
    const double start = std::max(a, bp[i]);
    out.push(start, f.pieces()[i].shifted(start - bp[i]));
  }
  double end = std::min(b, f.support_end());
  if (b > f.support_end()) {
    if (std::isinf(b)) {
      if (out.empty()) return PiecewiseFn({std::max(a, f.support_end())}, {}, f.tail());
      return out.finish(f.support_end(), f.tail());
    }
    if (f.tail() != 0.0) {
      out.push(std::max(a, f.support_end()), Cubic::constant(f.tail()));
      end = b;
    }
  }
  if (out.empty()) return PiecewiseFn{};
  return out.finish(end, 0.0);
}

PiecewiseFn reflect(const PiecewiseFn& f, double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("reflect needs a finite positive horizon");
  const PiecewiseFn r = restrict_to(f, 0.0, horizon);
  const auto& bp = r.breakpoints();
  Builder out;
  for (std::size_t k = r.size(); k-- > 0;) {
    const double len = bp[k + 1] - bp[k];
    out.push(horizon - bp[k + 1], r.pieces()[k].shifted(len).reflected());
  }
  if (out.empty()) return PiecewiseFn{};
  return out.finish(horizon - bp.front(), 0.0);
}

PiecewiseFn compose_young(const YoungFunction& phi, const PiecewiseFn& f) {
  if (!f.piecewise_constant()) throw UnsupportedDegreeError("compose_young needs a piecewise-constant function");
  std::vector<Cubic> pieces;
  pieces.reserve(f.size());
  for (const auto& p : f.pieces()) pieces.push_back(Cubic::constant(eval_young(phi, std::abs(p.c[0]))));
  return PiecewiseFn(f.breakpoints(), std::move(pieces), eval_young(phi, std::abs(f.tail())));
}

PiecewiseFn multiply(const PiecewiseFn& f, const PiecewiseFn& g) {
  const std::array<PiecewiseFn, 2> both{f, g};
  const auto merged = merged_breakpoints(both);
  Cursor cf(f);
  Cursor cg(g);
  Builder out;
  for (std::size_t j = 0; j + 1 < merged.size(); ++j) {
    const double mid = 0.5 * (merged[j] + merged[j + 1]);
    out.push(merged[j], product(cf.at(merged[j], mid), cg.at(merged[j], mid)));
  }
  const double tail = f.tail() * g.tail();
  if (out.empty()) return PiecewiseFn({merged.back()}, {}, tail);
  return out.finish(merged.back(), tail);
}

PiecewiseFn linear_combination(std::span<const PiecewiseFn> fs, std::span<const double> weights) {
  if (fs.size() != weights.size()) throw DomainError("linear_combination: one weight per function");
  if (fs.empty()) return PiecewiseFn{};
  const auto merged = merged_breakpoints(fs);
  std::vector<Cursor> cursors;
  cursors.reserve(fs.size());
  for (const auto& f : fs) cursors.emplace_back(f);
  Builder out;
  for (std::size_t j = 0; j + 1 < merged.size(); ++j) {
    const double mid = 0.5 * (merged[j] + merged[j + 1]);
    Cubic acc;
    for (std::size_t k = 0; k < fs.size(); ++k) {
      const Cubic p = cursors[k].at(merged[j], mid);
      for (int i = 0; i < 4; ++i) acc.c[i] += weights[k] * p.c[i];
    }
    out.push(merged[j], acc);
  }
  double tail = 0.0;
  for (std::size_t k = 0; k < fs.size(); ++k) tail += weights[k] * fs[k].tail();
  if (out.empty()) return PiecewiseFn({merged.back()}, {}, tail);
  return out.finish(merged.back(), tail);
}

PiecewiseFn add(const PiecewiseFn& f, const PiecewiseFn& g) {
  const std::array<PiecewiseFn, 2> fs{f, g};
  const std::array<double, 2> w{1.0, 1.0};
  return linear_combination(fs, w);
}

PiecewiseFn subtract(const PiecewiseFn& f, const PiecewiseFn& g) {
  const std::array<PiecewiseFn, 2> fs{f, g};
  const std::array<double, 2> w{1.0, -1.0};
  return linear_combination(fs, w);
}

PiecewiseFn scale(const PiecewiseFn& f, double c) {
  std::vector<Cubic> pieces = f.pieces();
  for (auto& p : pieces) {
    for (double& x : p.c) x *= c;
  }
  return PiecewiseFn(f.breakpoints(), std::move(pieces), f.tail() * c);
}

PiecewiseFn derivative(const PiecewiseFn& f) {
  std::vector<Cubic> pieces;
  pieces.reserve(f.size());
  for (const auto& p : f.pieces()) pieces.push_back(p.derivative());
  return PiecewiseFn(f.breakpoints(), std::move(pieces), 0.0);
}

PiecewiseFn antiderivative(const PiecewiseFn& f) {
  if (!f.zero_tail()) throw UnsupportedDegreeError("antiderivative of a nonzero tail leaves the piecewise class");
  std::vector<Cubic> pieces;
  pieces.reserve(f.size());
  double running = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Cubic& p = f.pieces()[i];
    if (p.degree() > 2) throw UnsupportedDegreeError("antiderivative of a cubic piece exceeds degree 3");
    pieces.push_back(Cubic{{running, p.c[0], p.c[1] / 2.0, p.c[2] / 3.0}});
    running += p.antiderivative(f.breakpoints()[i + 1] - f.breakpoints()[i]);
  }
  return PiecewiseFn(f.breakpoints(), std::move(pieces), running);
}

std::string to_csv(const PiecewiseFn& f) {
  std::string out = "b,c0,c1,c2,c3\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& c = f.pieces()[i].c;
    out += csv::join_row({f.breakpoints()[i], c[0], c[1], c[2], c[3]});
    out += '\n';
  }
  out += csv::join_row({f.support_end(), f.tail(), 0.0, 0.0, 0.0});
  out += '\n';
  return out;
}

PiecewiseFn from_csv(const csv::Table& table) {
  if (table.header.size() != 5) throw ParseError("piecewise CSV needs columns b,c0,c1,c2,c3");
  if (table.rows.empty()) throw ParseError("piecewise CSV needs at least the tail row");
  std::vector<double> breakpoints;
  std::vector<Cubic> pieces;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    breakpoints.push_back(row[0]);
    if (i + 1 < table.rows.size()) pieces.push_back(Cubic{{row[1], row[2], row[3], row[4]}});
  }
  const auto& last = table.rows.back();
  if (last[2] != 0.0 || last[3] != 0.0 || last[4] != 0.0) throw ParseError("piecewise CSV: tail row must be constant");
  return PiecewiseFn(std::move(breakpoints), std::move(pieces), last[1]);
}

PiecewiseFn read_piecewise(const std::string& path) { return from_csv(csv::read_table(path)); }

}  // namespace oiss
