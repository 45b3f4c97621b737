#pragma once

#include <functional>

namespace oiss::quad {

// Adaptive Gauss-Kronrod (7/15) with recursive bisection. Stops on a panel once
// its error estimate is below max(abs_tol, rel_tol * |panel estimate|).
double adaptive(const std::function<double(double)>& f, double a, double b,
                double abs_tol = 1e-12, double rel_tol = 1e-10, int max_depth = 40);

// Composite 8-point Gauss-Legendre over `panels` equal panels of [a, b].
double composite_gauss(const std::function<double(double)>& f, double a, double b,
                       int panels);

// Nodes and weights of the 8-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  const double* nodes;
  const double* weights;
  int size;
};
GaussRule gauss_legendre8();

}  // namespace oiss::quad
