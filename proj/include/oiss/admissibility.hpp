#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oiss/orlicz.hpp"
#include "oiss/systems.hpp"

namespace oiss {

enum class ComparisonClass { K, KInfinity, L };

std::string class_name(ComparisonClass c);

// Scalar function with a declared comparison class. Membership is certified
// only on probe grids.
struct ComparisonFn {
  std::function<double(double)> fn;
  ComparisonClass claim = ComparisonClass::K;
  std::string name;

  double operator()(double x) const { return fn(x); }

  static ComparisonFn identity();
  static ComparisonFn linear(double slope);
  // x^p, class K-infinity for p > 0.
  static ComparisonFn power(double p, double coefficient = 1.0);
  // M |x0| e^(-omega t), class L in t.
  static ComparisonFn exponential_decay(double m, double omega, double x0_norm);
  // t -> ||T(t) x0||, class L in t.
  static ComparisonFn semigroup_orbit(const SystemModel& model, const StateFn& x0);
};

struct ClassCheckOptions {
  std::vector<double> grid;         // empty: 200 log-spaced points on [1e-6, 1e6]
  double kinf_threshold = 1e2;      // K-infinity: value at the grid end must exceed this
  double l_threshold = 1e-6;        // L: value at the grid end must be below this
  double jump_step = 1e-9;          // relative probe offset for the continuity check
  double jump_bound = 1e-6;         // allowed change over that offset, relative to max(1, |f|)
};

struct ClassCheck {
  bool pass = true;
  std::optional<double> first_failure;
  std::string detail;
};

ClassCheck check_class(const ComparisonFn& f, const ClassCheckOptions& options = {});

// ---- admissibility constants --------------------------------------------

struct NamedInput {
  std::string name;
  Input input;
};

struct AdmissibilityEntry {
  double t = 0.0;
  double best_ratio = 0.0;  // lower bound for c(t)
  std::string witness;
  double running_max = 0.0;
  std::vector<std::string> warnings;
};

// max over the family of ||Phi_t(u)|| / ||u||_{Z(0,t;U)}. Zero-norm inputs are
// skipped with a warning; throws DomainError when nothing is left.
AdmissibilityEntry admissibility_constant(const SystemModel& model, const NormSpec& z, double t,
                                          const std::vector<NamedInput>& family);

enum class Verdict { BoundedEvidence, UnboundedEvidence, Inconclusive };

std::string verdict_name(Verdict v);

struct AdmissibilityReport {
  std::vector<AdmissibilityEntry> entries;
  Verdict verdict = Verdict::Inconclusive;
  double c_infinity_estimate = 0.0;  // final running max, a lower bound
  double growth = 0.0;               // running max at the end over the one at the start
};

using FamilyGenerator = std::function<std::vector<NamedInput>(double t)>;

// Evidence only. Needs >= 5 grid points spanning >= 3 decades.
AdmissibilityReport infinite_time_verdict(const SystemModel& model, const NormSpec& z, const std::vector<double>& t_grid,
                                          const FamilyGenerator& family, double growth_factor = 2.0);

// Built-in families. `shifted-bumps` and `constant` exist for every model;
// the counterexample family is assembled by the counterexample module.
std::vector<NamedInput> shifted_bumps(const SystemModel& model, double t);
std::vector<NamedInput> constant_family(const SystemModel& model, double t);

// ---- certificates ----------------------------------------------------------

inline constexpr double kDefaultSlack = 1e-9;

struct CertificateRow {
  double t = 0.0;
  double lhs = 0.0;  // ||x(t)||
  double rhs = 0.0;
  bool pass = true;
};

struct CertificateReport {
  std::vector<CertificateRow> rows;
  bool pass = true;
  std::optional<std::size_t> first_failure;
};

using InputAt = std::function<Input(double t)>;

struct CertificateOptions {
  double slack = kDefaultSlack;
  ClassCheckOptions class_options;
};

// ||x(t)|| <= beta(t) + mu(||u||_{Z(0,t;U)}) on every grid point. The input
// used at time t is input_at(t). beta is the certificate's beta(x0, .); its
// class-L check is skipped when it vanishes identically at the probe points.
CertificateReport verify_siss(const SystemModel& model, const StateFn& x0, const InputAt& input_at,
                              const std::vector<double>& t_grid, const ComparisonFn& beta, const ComparisonFn& mu,
                              const NormSpec& z, const CertificateOptions& options = {});

// ||x(t)|| <= beta(t) + theta(int_0^t mu(||u(s)||_U) ds).
CertificateReport verify_siiss(const SystemModel& model, const StateFn& x0, const InputAt& input_at,
                               const std::vector<double>& t_grid, const ComparisonFn& beta,
                               const ComparisonFn& theta, const ComparisonFn& mu,
                               const CertificateOptions& options = {});

// ---- theta gain ------------------------------------------------------------

struct ThetaProbe {
  std::string name;
  Input input;
  double t = 0.0;
};

struct ThetaRow {
  double alpha = 0.0;
  double theta = 0.0;  // running max, a lower bound for the true sup
  std::string witness;
};

// For each alpha, rescales every probe input so that int Phi1(||u(s)||) ds <= alpha
// and records the largest ||x(t)|| (x0 = 0). Rows are sorted by alpha.
std::vector<ThetaRow> estimate_theta(const SystemModel& model, const YoungFunction& phi1,
                                     std::vector<double> alphas, const std::vector<ThetaProbe>& probes);

}  // namespace oiss
