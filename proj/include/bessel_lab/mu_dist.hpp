#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bessel_lab/specfun.hpp"

namespace bessel_lab {

// Smooth rapidly decreasing function on [0, inf) with its Taylor data at 0.
class SmoothTestFn {
 public:
  using Eval = std::function<double(double)>;
  using SeriesGen = std::function<PowerSeries(int)>;

  // derivs[k] evaluates f^{(k)}; entries may be empty beyond the ones available.
  // `scale` is a length beyond which f decays at least exponentially.
  SmoothTestFn(std::vector<Eval> derivs, SeriesGen series, double scale, std::string name = "");

  static SmoothTestFn exp_decay(double lambda);      // e^{-lambda x}
  static SmoothTestFn gaussian();                    // e^{-x^2}
  static SmoothTestFn linear_exp();                  // (1 + x) e^{-2x}
  static SmoothTestFn polynomial_damped(std::vector<double> poly, double lambda);  // p(x) e^{-lambda x}
  static SmoothTestFn by_name(const std::string& name, double lambda = 1.0);

  double operator()(double x) const { return derivs_[0](x); }
  double derivative(int k, double x) const;
  int available_derivatives() const;
  PowerSeries series(int order) const { return series_(order); }
  double scale() const { return scale_; }
  const std::string& name() const { return name_; }

  SmoothTestFn derivative_fn() const;  // f'
  SmoothTestFn times_x() const;        // x f(x)

 private:
  std::vector<Eval> derivs_;
  SeriesGen series_;
  double scale_;
  std::string name_;
};

// T^n_x f = f(x) - sum_{j <= n} x^j f^{(j)}(0)/j!; n < 0 gives f(x).
double taylor_remainder(const SmoothTestFn& f, int n, double x);

// <mu_alpha, f>, alpha in [-4, 5].
double mu_pair(double alpha, const SmoothTestFn& f);

// Finite-part integral  FP int_0^inf f(x) x^{alpha-1} dx  = Gamma(alpha) <mu_alpha, f>
// for alpha not a nonpositive integer.  Taylor data near 0 replaces the subtracted
// remainder where cancellation would dominate.
double finite_part_mellin(double alpha, const SmoothTestFn& f);

constexpr double kIntegerGuard = 1e-12;

}  // namespace bessel_lab
