#include "oiss/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace oiss::quad {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;

double recurse(const std::function<double(double)>& f, double a, double b,
               double estimate, double err, double abs_tol, double rel_tol, int depth) {
  if (err <= std::max(abs_tol, rel_tol * std::abs(estimate)) || depth <= 0 ||
      !(b - a > 4 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b)))) {
    return estimate;
  }
  const double mid = 0.5 * (a + b);
  double err_l = 0.0;
  double err_r = 0.0;
  const double left = Kronrod::integrate(f, a, mid, 0, 0.0, &err_l);
  const double right = Kronrod::integrate(f, mid, b, 0, 0.0, &err_r);
  return recurse(f, a, mid, left, err_l, 0.5 * abs_tol, rel_tol, depth - 1) +
         recurse(f, mid, b, right, err_r, 0.5 * abs_tol, rel_tol, depth - 1);
}

}  // namespace

double adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  double err = 0.0;
  const double estimate = Kronrod::integrate(f, a, b, 0, 0.0, &err);
  return recurse(f, a, b, estimate, err, abs_tol, rel_tol, max_depth);
}

GaussRule gauss_legendre8() {
  static const std::array<double, 8> nodes = [] {
    std::array<double, 8> x{};
    const auto& abscissa = boost::math::quadrature::gauss<double, 8>::abscissa();
    for (int i = 0; i < 4; ++i) {
      x[2 * i] = -abscissa[i];
      x[2 * i + 1] = abscissa[i];
    }
    return x;
  }();
  static const std::array<double, 8> weights = [] {
    std::array<double, 8> w{};
    const auto& wt = boost::math::quadrature::gauss<double, 8>::weights();
    for (int i = 0; i < 4; ++i) {
      w[2 * i] = wt[i];
      w[2 * i + 1] = wt[i];
    }
    return w;
  }();
  return {nodes.data(), weights.data(), 8};
}

double composite_gauss(const std::function<double(double)>& f, double a, double b, int panels) {
  const GaussRule rule = gauss_legendre8();
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * h;
    const double c = lo + 0.5 * h;
    double sum = 0.0;
    for (int i = 0; i < rule.size; ++i) sum += rule.weights[i] * f(c + 0.5 * h * rule.nodes[i]);
    total += 0.5 * h * sum;
  }
  return total;
}

}  // namespace oiss::quad
