#include "oiss/counterexample.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "oiss/csv.hpp"
#include "oiss/error.hpp"
#include "oiss/orlicz.hpp"

namespace oiss {

namespace {

constexpr int kBisectionBudget = 200;
constexpr std::size_t kMaxCellsPerPiece = 64;

double ratio_bound(std::size_t k) { return std::ldexp(1.0, -static_cast<int>(k)); }

// Largest t in (0, cap] with Phi(t)/t <= bound. Phi(t)/t is nondecreasing for
// a Young function, so the admissible set is an interval starting at 0.
double largest_admissible(const YoungFunction& phi, double bound, double cap) {
  auto ok = [&](double t) { return eval_young(phi, t) / t <= bound; };
  if (ok(cap)) return cap;
  double hi = cap;
  double lo = 0.5 * cap;
  int steps = 0;
  while (!ok(lo)) {
    hi = lo;
    lo *= 0.5;
    if (++steps > kBisectionBudget || lo == 0.0) {
      throw ConstructionError(fmt::format("no t in (0, 1) with Phi(t)/t <= {}", bound));
    }
  }
  for (int i = 0; i < kBisectionBudget; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

U0Construction construct_u0(const YoungFunction& phi, std::size_t blocks,
                            const std::optional<std::vector<double>>& explicit_tk) {
  if (blocks == 0) throw ConstructionError("the number of blocks must be at least 1");
  if (explicit_tk && explicit_tk->size() != blocks) {
    throw ConstructionError(fmt::format("{} explicit t_k given for {} blocks", explicit_tk->size(), blocks));
  }
  U0Construction out;
  auto& spec = out.blocks;
  spec.breakpoints.push_back(0.0);
  double modular = 0.0;
  for (std::size_t k = 0; k < blocks; ++k) {
    const double bound = ratio_bound(k);
    double tk = 0.0;
    if (explicit_tk) {
      tk = (*explicit_tk)[k];
      if (!(tk > 0.0 && tk < 1.0)) throw ConstructionError(fmt::format("t_{} = {} is not in (0, 1)", k, tk));
    } else {
      tk = largest_admissible(phi, bound, 0.5 * bound);
    }
    const double ratio = eval_young(phi, tk) / tk;
    if (!(ratio <= bound)) {
      throw ConstructionError(fmt::format("t_{} = {}: Phi(t)/t = {} exceeds 2^-{}", k, tk, ratio, k));
    }
    modular += ratio;
    spec.t.push_back(tk);
    spec.breakpoints.push_back(spec.breakpoints.back() + 1.0 / tk);
  }
  if (!(modular <= 2.0)) throw ConstructionError(fmt::format("sum Phi(t_k)/t_k = {} exceeds 2", modular));
  out.u0 = PiecewiseFn::step(spec.breakpoints, spec.t);
  return out;
}

HConstruction construct_h(const PiecewiseFn& f) {
  if (!f.zero_tail()) throw ConstructionError("construct_h needs f with a zero tail (finite truncation)");
  if (f.is_zero()) throw ConstructionError("construct_h needs f with positive mass");
  HConstruction out;

  // cell nodes
  std::vector<double> regions{0.0};
  for (double b : f.breakpoints()) {
    if (b > regions.back()) regions.push_back(b);
  }
  out.nodes.push_back(0.0);
  for (std::size_t i = 0; i + 1 < regions.size(); ++i) {
    const double a = regions[i];
    const double len = regions[i + 1] - a;
    const auto cells = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(len)), 1, kMaxCellsPerPiece);
    for (std::size_t j = 1; j < cells; ++j) out.nodes.push_back(a + len * static_cast<double>(j) / cells);
    out.nodes.push_back(regions[i + 1]);
  }

  const std::size_t n_cells = out.nodes.size() - 1;
  double sum = 0.0;
  for (std::size_t n = 0; n < n_cells; ++n) {
    const double cn = integrate(f, out.nodes[n], out.nodes[n + 1]);
    if (cn < 0.0) throw ConstructionError(fmt::format("f has negative mass {} on cell {}", cn, n));
    if (cn == 0.0) {
      if (n == 0) throw ConstructionError("f has zero mass on the first cell");
      out.warnings.push_back(fmt::format("zero mass on cell [{}, {}); d is not strictly decreasing there",
                                         out.nodes[n], out.nodes[n + 1]));
    }
    sum += cn;
    out.c.push_back(cn);
    out.s.push_back(sum);
    out.d.push_back(1.0 / sum);
  }

  // cell n runs from d_n to d_{n+1}; the last support cell is flat, then one
  // more cell of the same width brings h down to 0
  std::vector<double> bps(out.nodes);
  std::vector<Cubic> pieces;
  auto smoothstep = [](double from, double to, double w) {
    const double delta = from - to;
    return Cubic{{from, 0.0, -3.0 * delta / (w * w), 2.0 * delta / (w * w * w)}};
  };
  for (std::size_t n = 0; n < n_cells; ++n) {
    const double w = out.nodes[n + 1] - out.nodes[n];
    const double next = n + 1 < n_cells ? out.d[n + 1] : out.d[n];
    pieces.push_back(smoothstep(out.d[n], next, w));
  }
  const double last_width = out.nodes[n_cells] - out.nodes[n_cells - 1];
  bps.push_back(out.nodes[n_cells] + last_width);
  pieces.push_back(smoothstep(out.d.back(), 0.0, last_width));

  out.h = PiecewiseFn(std::move(bps), std::move(pieces), 0.0);
  out.g = scale(derivative(out.h), -1.0);
  return out;
}

SeparableInput build_input(const PiecewiseFn& u0, const PiecewiseFn& g) {
  if (!u0.piecewise_constant() || !u0.zero_tail()) {
    throw ConstructionError("u0 must be piecewise constant with a zero tail");
  }
  if (!g.zero_tail()) throw ConstructionError("g must have a zero tail");
  const PiecewiseFn big_g = antiderivative(g);
  // h(s) = int_s^inf g = G(inf) - G(s)
  PiecewiseFn h = subtract(PiecewiseFn::constant(big_g.tail()), big_g);
  return SeparableInput{u0, std::move(h), g};
}

double linf_bound(const SeparableInput& u) { return max_abs(u.u0) * max_abs(u.h); }

Counterexample build_counterexample(const YoungFunction& phi, std::size_t blocks,
                                    const std::optional<std::vector<double>>& explicit_tk) {
  Counterexample c;
  c.u0 = construct_u0(phi, blocks, explicit_tk);
  c.h = construct_h(c.u0.u0);
  c.input = build_input(c.u0.u0, c.h.g);
  return c;
}

CounterexampleReport run_counterexample(const YoungFunction& phi, std::size_t blocks, const GridSpec& t_grid,
                                        const std::optional<std::vector<double>>& explicit_tk, double tol) {
  CounterexampleReport report;
  report.construction = build_counterexample(phi, blocks, explicit_tk);
  const auto& c = report.construction;
  const SeparableInput& u = c.input;

  std::vector<double> times;
  if (std::holds_alternative<BlockBreakpoints>(t_grid)) {
    times.assign(c.u0.blocks.breakpoints.begin() + 1, c.u0.blocks.breakpoints.end());
  } else {
    times = std::get<std::vector<double>>(t_grid);
    require_increasing(times, "counterexample time grid");
  }

  const PiecewiseFn u0h = multiply(u.u0, u.h);
  const double bound = max_abs(u.h) * luxemburg_norm(phi, u.u0, tol).value;
  const SystemModel model = TranslationL1{};
  for (double t : times) {
    if (!(t > 0.0)) throw DomainError("counterexample grid times must be positive");
    CounterexampleRow row;
    row.t = t;
    row.x_norm_fubini = integrate(u0h, 0.0, t);
    row.x_norm_direct = state_norm(input_to_state_map(model, u, t));
    const PiecewiseFn profile = norm_profile(u, t);
    row.u_l1 = lp_norm(profile, 1.0).value;
    row.u_ephi = luxemburg_norm(phi, profile, tol).value;
    row.ephi_bound = bound;
    const double linf = max_abs(profile);
    row.ratio_l1 = row.x_norm_direct / row.u_l1;
    row.ratio_ephi = row.x_norm_direct / row.u_ephi;
    row.ratio_linf = row.x_norm_direct / linf;
    report.rows.push_back(row);
  }
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    if (!(r.ratio_l1 <= 1.0 + 1e-9)) report.l1_bounded = false;
    if (i > 0) {
      const auto& p = report.rows[i - 1];
      if (!(r.ratio_ephi > p.ratio_ephi)) report.ephi_increasing = false;
      if (!(r.ratio_linf > p.ratio_linf)) report.linf_increasing = false;
    }
  }
  return report;
}

std::string report_csv(const CounterexampleReport& report) {
  std::string out = "t,x_norm_fubini,x_norm_direct,u_l1,u_ephi,ephi_bound,ratio_l1,ratio_ephi,ratio_linf\n";
  for (const auto& r : report.rows) {
    out += csv::join_row({r.t, r.x_norm_fubini, r.x_norm_direct, r.u_l1, r.u_ephi, r.ephi_bound, r.ratio_l1,
                          r.ratio_ephi, r.ratio_linf});
    out += '\n';
  }
  return out;
}

void dump_functions(const Counterexample& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const PiecewiseFn& f) {
    std::ofstream os(dir / name);
    if (!os) throw Error(fmt::format("cannot write {}", (dir / name).string()));
    os << to_csv(f);
  };
  write("u0.csv", c.input.u0);
  write("h.csv", c.input.h);
  write("g.csv", c.input.g);
}

FamilyGenerator counterexample_family(const SeparableInput& u) {
  return [u](double) { return std::vector<NamedInput>{{"counterexample", u}}; };
}

}  // namespace oiss
