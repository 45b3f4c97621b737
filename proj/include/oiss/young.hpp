#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace oiss {

class YoungFunction;

namespace young {

// Phi(t) = t^p, generator p t^(p-1).
struct Power {
  double p;
};

// Phi(t) = e^t - t - 1, generator e^t - 1.
struct ExpMinus {};

// Generator given by samples (s_i, phi_i), linearly interpolated. The sample
// (0, 0) is implied when the table starts at s > 0; beyond the last sample the
// last segment's slope is continued.
struct Tabulated {
  std::vector<double> s;
  std::vector<double> phi;
  std::vector<double> cumulative;  // Phi at each sample, exact for the interpolant
};

// Majorant built from a base Phi:
//   Phi1(x) = Lambda(x) = int_0^x phi(sqrt(r)) dr        for x < switch_point,
//   Phi1(x) = scale * Phi(x^2), scale = Lambda(1)/Phi(1)  for x >= switch_point.
struct PiecewiseMajorant {
  std::shared_ptr<const YoungFunction> base;
  double switch_point = 1.0;
  double lambda_at_switch = 0.0;  // Lambda(1)
  double base_at_switch = 0.0;    // Phi(1) = Psi(1)
  double scale = 0.0;
};

}  // namespace young

// A convex gauge Phi(t) = int_0^t phi(s) ds. Immutable once built.
class YoungFunction {
 public:
  using Family = std::variant<young::Power, young::ExpMinus, young::Tabulated,
                              young::PiecewiseMajorant>;

  static YoungFunction power(double p);
  static YoungFunction exp_minus();
  static YoungFunction tabulated(std::vector<double> s, std::vector<double> phi);

  // `power:P`, `exp_minus`, `tabulated:<path>` (CSV with header, columns s,phi).
  static YoungFunction parse(std::string_view spec);

  const Family& family() const { return family_; }

  // Phi(t) without argument checks; t must be >= 0.
  double operator()(double t) const;
  // phi(s), s >= 0.
  double generator(double s) const;

  // Lambda(x) = int_0^x phi(sqrt(r)) dr, closed form where known.
  double sqrt_generator_integral(double x) const;

  // True if any part of the generator is interpolated from samples.
  bool interpolated() const;

  std::string name() const;

 private:
  explicit YoungFunction(Family f) : family_(std::move(f)) {}
  friend YoungFunction majorant_phi1(const YoungFunction& phi);

  Family family_;
};

// Phi(t). Throws DomainError for negative or non-finite t.
double eval_young(const YoungFunction& phi, double t);

// Smallest-residual t with Phi(t) = y, by bracket doubling then bisection.
double young_inverse(const YoungFunction& phi, double y);

struct PropertyCheck {
  std::string property;
  bool pass = true;
  std::optional<double> first_failure;  // sample where the check first failed
  std::string detail;
};

struct ValidityReport {
  std::vector<PropertyCheck> checks;
  std::vector<std::string> notes;

  bool all_pass() const;
  const PropertyCheck* find(std::string_view property) const;
};

// Property names used in ValidityReport.
inline constexpr std::string_view kGeneratorAtZero = "generator_zero_at_origin";
inline constexpr std::string_view kGeneratorPositive = "generator_positive";
inline constexpr std::string_view kGeneratorMonotone = "generator_nondecreasing";
inline constexpr std::string_view kGeneratorDiverges = "generator_divergence_proxy";
inline constexpr std::string_view kPhiZeroAtOrigin = "phi_zero_at_origin";
inline constexpr std::string_view kPhiMonotone = "phi_nondecreasing";
inline constexpr std::string_view kPhiConvex = "phi_convex";
inline constexpr std::string_view kPhiIntegral = "phi_matches_generator_integral";

// Checks the defining properties on `grid`. Failures are report entries.
ValidityReport check_young(const YoungFunction& phi, const std::vector<double>& grid,
                           double blowup_threshold);

struct Delta2Result {
  double index = 0.0;  // max over the grid of Phi(2s)/Phi(s); +inf if it overflowed
  bool delta2 = true;  // false: ratio still strictly increasing and above the cap
  std::vector<double> ratios;
};

// Classifier for the Delta_2 condition with s0 = 0.
Delta2Result delta2_index(const YoungFunction& phi, const std::vector<double>& grid,
                          double cap = 1e6);

YoungFunction majorant_phi1(const YoungFunction& phi);

}  // namespace oiss
