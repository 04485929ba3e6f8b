#pragma once

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace floquet {

/// Adaptive 15-point Gauss–Kronrod integral of a scalar function from a to b
/// (b < a gives the negated integral).
template <typename F>
double integrate_adaptive(F&& f, double a, double b, double tol = 1e-10, unsigned max_depth = 20) {
  if (a == b) return 0.0;
  if (b < a) return -integrate_adaptive(f, b, a, tol, max_depth);
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, max_depth, tol);
}

}  // namespace floquet
