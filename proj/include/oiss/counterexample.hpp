#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "oiss/admissibility.hpp"
#include "oiss/grid.hpp"
#include "oiss/piecewise.hpp"
#include "oiss/systems.hpp"
#include "oiss/young.hpp"

namespace oiss {

// Blocks I_k = [sum_{j<k} 1/t_j, sum_{j<=k} 1/t_j), k = 0..K-1.
struct BlockSpec {
  std::vector<double> t;            // t_k in (0, 1), Phi(t_k)/t_k <= 2^-k
  std::vector<double> breakpoints;  // 0 = B_0 < B_1 < ... < B_K

  std::size_t size() const { return t.size(); }
};

struct U0Construction {
  BlockSpec blocks;
  PiecewiseFn u0;  // t_k on I_k, zero after the last block
};

// Without `explicit_tk` each t_k is the largest t in (0, 1) with
// Phi(t)/t <= 2^-k, capped at 2^-(k+1). Throws ConstructionError.
U0Construction construct_u0(const YoungFunction& phi, std::size_t blocks,
                            const std::optional<std::vector<double>>& explicit_tk = std::nullopt);

struct HConstruction {
  PiecewiseFn h;             // C1, nonincreasing, zero tail
  PiecewiseFn g;             // -h'
  std::vector<double> nodes;  // tau_0 < ... < tau_N; cell n is [tau_n, tau_{n+1})
  std::vector<double> c;      // mass of f on cell n
  std::vector<double> s;      // partial sums S_n
  std::vector<double> d;      // 1 / S_n = h(tau_n)
  std::vector<std::string> warnings;
};

// Cells: every piece of f of length l is split into clamp(ceil(l), 1, 64)
// equal cells, so pieces of length <= 64 give unit cells. h interpolates
// h(tau_n) = d_n by cubic smoothstep, is constant on the last cell and drops
// to 0 over one more cell of the same width. f must be nonnegative with a zero tail.
HConstruction construct_h(const PiecewiseFn& f);

// u(s)(r) = g(r) chi_[s, inf)(r) u0(s); h is recovered as h(s) = int_s^inf g.
SeparableInput build_input(const PiecewiseFn& u0, const PiecewiseFn& g);

// ||u||_{L-inf(0, inf; X)} <= ||u0||_inf ||h||_inf
double linf_bound(const SeparableInput& u);

struct Counterexample {
  U0Construction u0;
  HConstruction h;
  SeparableInput input;
};

Counterexample build_counterexample(const YoungFunction& phi, std::size_t blocks,
                                    const std::optional<std::vector<double>>& explicit_tk = std::nullopt);

struct CounterexampleRow {
  double t = 0.0;
  double x_norm_fubini = 0.0;  // int_0^t u0 h
  double x_norm_direct = 0.0;  // ||Phi_t(u)||_L1 from the closed form in r
  double u_l1 = 0.0;
  double u_ephi = 0.0;
  double ephi_bound = 0.0;  // ||h||_inf ||u0||_{L_Phi(0, inf)}
  double ratio_l1 = 0.0;
  double ratio_ephi = 0.0;
  double ratio_linf = 0.0;
};

struct CounterexampleReport {
  Counterexample construction;
  std::vector<CounterexampleRow> rows;
  bool l1_bounded = true;          // ratio_l1 <= 1 + 1e-9 everywhere
  bool ephi_increasing = true;     // strictly, across rows
  bool linf_increasing = true;
};

CounterexampleReport run_counterexample(const YoungFunction& phi, std::size_t blocks, const GridSpec& t_grid,
                                        const std::optional<std::vector<double>>& explicit_tk = std::nullopt,
                                        double tol = 1e-10);

// `t,x_norm_fubini,x_norm_direct,u_l1,u_ephi,ephi_bound,ratio_l1,ratio_ephi,ratio_linf`
std::string report_csv(const CounterexampleReport& report);

// u0.csv, h.csv, g.csv in the piecewise CSV format.
void dump_functions(const Counterexample& c, const std::filesystem::path& dir);

// Single-member family {u} for admissibility sweeps.
FamilyGenerator counterexample_family(const SeparableInput& u);

}  // namespace oiss
