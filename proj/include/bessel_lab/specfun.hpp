#pragma once

#include <vector>

namespace bessel_lab {

// e^{-z} I_nu(z) for nu > -1, z >= 0.
double bessel_i_scaled(double nu, double z);

// S_nu(w) = sum_k w^k / (k! Gamma(k + nu + 1)) = w^{-nu/2} I_nu(2 sqrt(w)), returned as
// log S_nu(w).  Entire in w; used for the analytic extensions at the origin.
double log_bessel_series(double nu, double w);

// Squared Bessel transition density q^delta_t(x, y).
double q_delta_t(double delta, double t, double x, double y);

// q^delta_t(x, y) / y^{delta/2 - 1}, extended analytically to y = 0.  Symmetric in (x, y).
double q_delta_t_reg(double delta, double t, double x, double y);
double log_q_delta_t_reg(double delta, double t, double x, double y);

// Bessel transition density p^delta_t(a, b) = 2 b q^delta_t(a^2, b^2).
double p_delta_t(double delta, double t, double a, double b);

// Density of X_t under the squared Bessel bridge from x to y over [0, 1].
double bridge_density_sq(double delta, double t, double x, double y, double z);

// Density of X_r under the Bessel bridge from a to a_prime over [0, 1].
double bridge_density(double delta, double r, double a, double a_prime, double b);

// Taylor data of y -> q_delta_t_reg(delta, t, x, y) at y = 0.
struct PowerSeries {
  std::vector<double> coeffs;
  std::vector<double> majorant;  // sums of absolute contributions, bounds rounding in coeffs
};
PowerSeries q_reg_series(double delta, double t, double x, int order);

// Cauchy product truncated to the shorter length; majorants multiply likewise.
PowerSeries series_product(const PowerSeries& a, const PowerSeries& b);
PowerSeries series_scale_argument(const PowerSeries& a, double c);  // f(c y)
PowerSeries series_scale(const PowerSeries& a, double c);           // c f(y)

}  // namespace bessel_lab
