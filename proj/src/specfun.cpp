#include "bessel_lab/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bessel_lab/errors.hpp"

namespace bessel_lab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRegThreshold = 1e-4;

void check_delta_t(double delta, double t) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("dimension must be positive");
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("time must be positive");
}

void check_state(double x, const char* name) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string("state ") + name + " must be finite and nonnegative");
  }
}

double series_scaled(double nu, double z) {
  double term = std::exp(nu * std::log(0.5 * z) - std::lgamma(nu + 1.0) - z);
  double sum = term;
  const double q = 0.25 * z * z;
  for (int k = 0; k < 10000; ++k) {
    term *= q / ((k + 1.0) * (k + nu + 1.0));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

double asymptotic_scaled(double nu, double z) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  double prev = kInf;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (8.0 * k * z);
    const double a = std::abs(term);
    if (a > prev) break;
    sum += term;
    if (a < 1e-17 * std::abs(sum)) break;
    prev = a;
  }
  return sum / std::sqrt(2.0 * M_PI * z);
}

// log S_nu(w) for w >= 0
double log_s(double nu, double w) {
  if (w == 0.0) return -std::lgamma(nu + 1.0);
  if (w <= 1.0) {
    double term = 1.0 / std::tgamma(nu + 1.0);
    double sum = term;
    for (int k = 0; k < 200; ++k) {
      term *= w / ((k + 1.0) * (k + nu + 1.0));
      sum += term;
      if (std::abs(term) < 1e-17 * sum) break;
    }
    return std::log(sum);
  }
  const double z = 2.0 * std::sqrt(w);
  return std::log(bessel_i_scaled(nu, z)) + z - 0.5 * nu * std::log(w);
}

// log q_reg; finite for all admissible arguments
double log_q_reg(double delta, double t, double x, double y) {
  const double nu = 0.5 * delta - 1.0;
  const double pre = -0.5 * delta * std::log(2.0 * t);
  if (x == 0.0 || y == 0.0) return pre - (x + y) / (2.0 * t) - std::lgamma(nu + 1.0);
  const double z = std::sqrt(x * y) / t;
  if (z < kRegThreshold) {
    const double w = 0.25 * z * z;
    return pre - (x + y) / (2.0 * t) + log_s(nu, w);
  }
  const double d = std::sqrt(x) - std::sqrt(y);
  const double w = 0.25 * z * z;
  return pre - d * d / (2.0 * t) - 0.5 * nu * std::log(w) + std::log(bessel_i_scaled(nu, z));
}

double pow_nu(double y, double nu) {
  if (y == 0.0) return nu > 0.0 ? 0.0 : (nu == 0.0 ? 1.0 : kInf);
  return std::pow(y, nu);
}

}  // namespace

double bessel_i_scaled(double nu, double z) {
  if (!(nu > -1.0) || !std::isfinite(nu)) throw DomainError("Bessel order must exceed -1");
  if (!(z >= 0.0) || !std::isfinite(z)) throw DomainError("Bessel argument must be >= 0");
  if (z == 0.0) return nu == 0.0 ? 1.0 : (nu > 0.0 ? 0.0 : kInf);
  const double zstar = std::max(30.0, 3.0 * nu * nu);
  return z <= zstar ? series_scaled(nu, z) : asymptotic_scaled(nu, z);
}

double log_bessel_series(double nu, double w) {
  if (!(nu > -1.0)) throw DomainError("Bessel order must exceed -1");
  if (!(w >= 0.0)) throw DomainError("series argument must be >= 0");
  return log_s(nu, w);
}

double q_delta_t_reg(double delta, double t, double x, double y) {
  check_delta_t(delta, t);
  check_state(x, "x");
  check_state(y, "y");
  return std::exp(log_q_reg(delta, t, x, y));
}

double log_q_delta_t_reg(double delta, double t, double x, double y) {
  check_delta_t(delta, t);
  check_state(x, "x");
  check_state(y, "y");
  return log_q_reg(delta, t, x, y);
}

double q_delta_t(double delta, double t, double x, double y) {
  check_delta_t(delta, t);
  check_state(x, "x");
  check_state(y, "y");
  const double nu = 0.5 * delta - 1.0;
  if (y == 0.0) {
    const double p = pow_nu(y, nu);
    return std::isinf(p) ? kInf : p * std::exp(log_q_reg(delta, t, x, y));
  }
  if (x == 0.0) {
    return std::exp(-0.5 * delta * std::log(2.0 * t) - std::lgamma(0.5 * delta) +
                    nu * std::log(y) - y / (2.0 * t));
  }
  return std::exp(nu * std::log(y) + log_q_reg(delta, t, x, y));
}

double p_delta_t(double delta, double t, double a, double b) {
  check_state(a, "a");
  check_state(b, "b");
  if (b == 0.0) {
    // 2b q(a^2, b^2) -> 2 b^{delta-1} q_reg
    const double p = pow_nu(b, delta - 1.0);
    check_delta_t(delta, t);
    return std::isinf(p) ? kInf : 2.0 * p * q_delta_t_reg(delta, t, a * a, 0.0);
  }
  return 2.0 * b * q_delta_t(delta, t, a * a, b * b);
}

double bridge_density_sq(double delta, double t, double x, double y, double z) {
  check_delta_t(delta, 1.0);
  if (!(t > 0.0 && t < 1.0)) throw DomainError("bridge time must lie in (0, 1)");
  check_state(x, "x");
  check_state(y, "y");
  check_state(z, "z");
  const double nu = 0.5 * delta - 1.0;
  const double zp = pow_nu(z, nu);
  if (std::isinf(zp)) return kInf;
  if (zp == 0.0) return 0.0;
  const double lg = log_q_reg(delta, t, x, z) + log_q_reg(delta, 1.0 - t, z, y) -
                    log_q_reg(delta, 1.0, x, y);
  return zp * std::exp(lg);
}

double bridge_density(double delta, double r, double a, double a_prime, double b) {
  check_delta_t(delta, 1.0);
  if (!(r > 0.0 && r < 1.0)) throw DomainError("bridge time must lie in (0, 1)");
  check_state(a, "a");
  check_state(a_prime, "a_prime");
  check_state(b, "b");
  const double bp = pow_nu(b, delta - 1.0);
  if (std::isinf(bp)) return kInf;
  if (bp == 0.0) return 0.0;
  const double x = a * a;
  const double y = a_prime * a_prime;
  const double s = b * b;
  const double lg = log_q_reg(delta, r, x, s) + log_q_reg(delta, 1.0 - r, s, y) -
                    log_q_reg(delta, 1.0, x, y);
  return 2.0 * bp * std::exp(lg);
}

PowerSeries q_reg_series(double delta, double t, double x, int order) {
  check_delta_t(delta, t);
  check_state(x, "x");
  if (order < 0) throw DomainError("series order must be >= 0");
  const double nu = 0.5 * delta - 1.0;
  const int n = order + 1;
  // A_i = (-1/2t)^i / i!,  B_l = w^l / (l! Gamma(l + nu + 1)) scaled by e^{-maxlogB}
  std::vector<double> A(n), B(n, 0.0), logB(n);
  const double inv2t = 1.0 / (2.0 * t);
  A[0] = 1.0;
  for (int i = 1; i < n; ++i) A[i] = A[i - 1] * (-inv2t) / i;
  double maxlog = -kInf;
  const double w = x / (4.0 * t * t);
  for (int l = 0; l < n; ++l) {
    if (x == 0.0) {
      logB[l] = l == 0 ? -std::lgamma(nu + 1.0) : -kInf;
    } else {
      logB[l] = l * std::log(w) - std::lgamma(l + 1.0) - std::lgamma(l + nu + 1.0);
    }
    maxlog = std::max(maxlog, logB[l]);
  }
  for (int l = 0; l < n; ++l) B[l] = std::isinf(logB[l]) ? 0.0 : std::exp(logB[l] - maxlog);
  const double logpre = -0.5 * delta * std::log(2.0 * t) - x * inv2t + maxlog;
  const double pre = std::exp(logpre);
  PowerSeries out;
  out.coeffs.assign(n, 0.0);
  out.majorant.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double s = 0.0, m = 0.0;
    for (int i = 0; i <= j; ++i) {
      const double p = A[i] * B[j - i];
      s += p;
      m += std::abs(p);
    }
    out.coeffs[j] = pre * s;
    out.majorant[j] = pre * m;
  }
  return out;
}

PowerSeries series_product(const PowerSeries& a, const PowerSeries& b) {
  const std::size_t n = std::min(a.coeffs.size(), b.coeffs.size());
  PowerSeries out;
  out.coeffs.assign(n, 0.0);
  out.majorant.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      out.coeffs[j] += a.coeffs[i] * b.coeffs[j - i];
      out.majorant[j] += a.majorant[i] * b.majorant[j - i];
    }
  }
  return out;
}

PowerSeries series_scale_argument(const PowerSeries& a, double c) {
  PowerSeries out = a;
  double p = 1.0;
  const double ac = std::abs(c);
  double pa = 1.0;
  for (std::size_t j = 0; j < a.coeffs.size(); ++j) {
    out.coeffs[j] *= p;
    out.majorant[j] *= pa;
    p *= c;
    pa *= ac;
  }
  return out;
}

PowerSeries series_scale(const PowerSeries& a, double c) {
  PowerSeries out = a;
  for (auto& v : out.coeffs) v *= c;
  for (auto& v : out.majorant) v *= std::abs(c);
  return out;
}

}  // namespace bessel_lab
