#pragma once

#include <optional>
#include <vector>

#include "bessel_lab/core_model.hpp"
#include "bessel_lab/mu_dist.hpp"
#include "bessel_lab/specfun.hpp"
#include "bessel_lab/sturm_liouville.hpp"

namespace bessel_lab {

// Conditioned Laplace transform b -> Sigma^{delta,r}(exp(-<m, X^2>) | b) for the Bessel
// process started at a (a_prime empty) or the bridge a -> a_prime.  Finite and even in b.
class SigmaContext {
 public:
  SigmaContext(double delta, double a, std::optional<double> a_prime, FiniteMeasure m,
               double sl_tol = 1e-12);

  double delta() const { return delta_; }
  double a() const { return a_; }
  const std::optional<double>& a_prime() const { return a_prime_; }
  bool bridge() const { return a_prime_.has_value(); }
  const FiniteMeasure& measure() const { return m_; }
  const SLSolution& sl() const { return sol_; }
  // exp(a^2 phi'(0-)/2) phi_1^{delta/2}
  double K() const { return K_; }

  double sigma(double r, double b) const;
  // Taylor coefficients of s -> sigma(r, sqrt(s)) at s = 0 (exact series)
  PowerSeries series_in_s(double r, int order) const;
  // the same coefficients from Richardson-extrapolated one-sided differences in s
  std::vector<double> series_in_s_richardson(double r, int order) const;
  // s -> sigma(r, sqrt(s)) and b -> sigma(r, b) as test functions on [0, inf)
  SmoothTestFn as_fn_s(double r) const;
  SmoothTestFn as_fn_b(double r) const;
  // E[X_r exp(-<m, X^2>)] = int b^delta sigma(r, b) db
  double mean_x_phi(double r) const;
  // E[exp(-<m, X^2>)]
  double laplace(double r) const;

 private:
  // sigma(r, sqrt(s)) = pre(r) * G(r, s)
  double log_pre(double r) const;
  double s_scale(double r) const;

  double delta_, a_;
  std::optional<double> a_prime_;
  FiniteMeasure m_;
  SLSolution sol_;
  double K_;
  double log_c_;  // r-independent part of log pre
};

// Linear combination over the terms of an exponential functional.
class SigmaFunctional {
 public:
  SigmaFunctional(double delta, double a, std::optional<double> a_prime, const ExpFunctional& phi,
                  double sl_tol = 1e-12);
  double sigma(double r, double b) const;
  PowerSeries series_in_s(double r, int order) const;
  SmoothTestFn as_fn_s(double r) const;
  SmoothTestFn as_fn_b(double r) const;
  double mean_x_phi(double r) const;
  const std::vector<double>& coefs() const { return coefs_; }
  const std::vector<SigmaContext>& contexts() const { return ctx_; }

 private:
  std::vector<double> coefs_;
  std::vector<SigmaContext> ctx_;
};

double sigma_uncond(const SigmaContext& ctx, double r, double b);
double sigma_bridge(const SigmaContext& ctx, double r, double b);

// y -> q_delta_t_reg(delta, t, x, y) with its Taylor data
SmoothTestFn q_reg_test_fn(double delta, double t, double x);

// E^delta_a[X_t]
double zeta(double delta, double a, double t);
// the same by quadrature of sqrt(y) q_t(a^2, y)
double zeta_quadrature(double delta, double a, double t);

enum class ZetaRoute { FiniteDifference, FinitePart };
double zeta_second_deriv(double delta, double a, double t, ZetaRoute route);

}  // namespace bessel_lab
