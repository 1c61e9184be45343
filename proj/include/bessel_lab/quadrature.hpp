#pragma once

#include <functional>
#include <vector>

namespace bessel_lab {

using RealFn = std::function<double(double)>;

struct QuadOptions {
  double abs_tol = 1e-15;
  double rel_tol = 1e-12;
  int max_intervals = 4000;
};

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  long evaluations = 0;
  bool converged = true;
};

// Globally adaptive 10/21-point Gauss-Kronrod on [a, b].
QuadResult integrate(const RealFn& f, double a, double b, const QuadOptions& opts = {});

// Same, over consecutive sub-intervals of a sorted list of break points.
QuadResult integrate_breaks(const RealFn& f, const std::vector<double>& breaks,
                            const QuadOptions& opts = {});

// Integral over [a, inf) for integrands with (at least) exponential decay on the
// length scale `scale`.  Chunks of geometrically growing length are added until
// two consecutive chunks are negligible.
QuadResult integrate_to_infinity(const RealFn& f, double a, double scale,
                                 const QuadOptions& opts = {});

// Fixed n-point Gauss-Legendre rule on [a, b] (n in {5, 10, 20}).
double gauss_legendre(const RealFn& f, double a, double b, int n = 20);

}  // namespace bessel_lab
