#include "bessel_lab/laplace_sigma.hpp"

#include <cmath>
#include <sstream>

#include "bessel_lab/errors.hpp"
#include "bessel_lab/quadrature.hpp"

namespace bessel_lab {
namespace {

constexpr int kSeriesOrder = 40;

void check_r(double r) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("conditioning time must lie in (0, 1)");
}

// Richardson table for a difference quotient with O(h^2) error, steps h, h/2, h/4
double richardson3(double d0, double d1, double d2) {
  const double r1 = (4.0 * d1 - d0) / 3.0;
  const double r2 = (4.0 * d2 - d1) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

}  // namespace

SigmaContext::SigmaContext(double delta, double a, std::optional<double> a_prime, FiniteMeasure m,
                           double sl_tol)
    : delta_(delta), a_(a), a_prime_(a_prime), m_(std::move(m)), sol_(solve_sl(m_, sl_tol)) {
  if (!(delta > 0.0)) throw DomainError("dimension must be positive");
  if (!(a >= 0.0)) throw DomainError("starting point must be >= 0");
  if (a_prime && !(*a_prime >= 0.0)) throw DomainError("end point must be >= 0");
  const double phi1 = sol_.phi1();
  const double lead = 0.5 * a * a * sol_.dphi0_left();
  K_ = std::exp(lead + 0.5 * delta * std::log(phi1));
  if (bridge()) {
    const double ap = *a_prime;
    log_c_ = std::log(2.0) + lead - 0.5 * delta * std::log(phi1) -
             log_q_delta_t_reg(delta, 1.0, a * a, ap * ap);
  } else {
    log_c_ = std::log(2.0 * K_);
  }
}

double SigmaContext::log_pre(double r) const { return log_c_ - delta_ * std::log(sol_.phi(r)); }

double SigmaContext::s_scale(double r) const {
  const double phr = sol_.phi(r);
  double shift = a_;
  if (bridge()) shift += *a_prime_ / sol_.phi1();
  return phr * phr * (2.0 * sol_.rho(r) + shift * shift);
}

double SigmaContext::sigma(double r, double b) const {
  check_r(r);
  if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("b must be finite and >= 0");
  const double phr = sol_.phi(r);
  const double rr = sol_.rho(r);
  const double w = b * b / (phr * phr);
  double lg = log_pre(r) + log_q_delta_t_reg(delta_, rr, a_ * a_, w);
  if (bridge()) {
    const double y = *a_prime_ / sol_.phi1();
    lg += log_q_delta_t_reg(delta_, sol_.rho1() - rr, w, y * y);
  }
  return std::exp(lg);
}

PowerSeries SigmaContext::series_in_s(double r, int order) const {
  check_r(r);
  const double phr = sol_.phi(r);
  const double rr = sol_.rho(r);
  PowerSeries g = q_reg_series(delta_, rr, a_ * a_, order);
  if (bridge()) {
    const double y = *a_prime_ / sol_.phi1();
    g = series_product(g, q_reg_series(delta_, sol_.rho1() - rr, y * y, order));
  }
  g = series_scale_argument(g, 1.0 / (phr * phr));
  return series_scale(g, std::exp(log_pre(r)));
}

std::vector<double> SigmaContext::series_in_s_richardson(double r, int order) const {
  if (order < 0 || order > 2) throw DomainError("Richardson Taylor data supported up to order 2");
  const double sc = s_scale(r);
  auto F = [&](double s) { return sigma(r, std::sqrt(s)); };
  const double f0 = F(0.0);
  std::vector<double> out{f0};
  const double steps[3] = {1e-3 * sc, 5e-4 * sc, 2.5e-4 * sc};
  if (order >= 1) {
    double d[3];
    for (int i = 0; i < 3; ++i) {
      const double h = steps[i];
      d[i] = (-3.0 * f0 + 4.0 * F(h) - F(2.0 * h)) / (2.0 * h);
    }
    out.push_back(richardson3(d[0], d[1], d[2]));
  }
  if (order >= 2) {
    double d[3];
    for (int i = 0; i < 3; ++i) {
      const double h = steps[i];
      d[i] = (2.0 * f0 - 5.0 * F(h) + 4.0 * F(2.0 * h) - F(3.0 * h)) / (h * h);
    }
    out.push_back(0.5 * richardson3(d[0], d[1], d[2]));
  }
  return out;
}

SmoothTestFn SigmaContext::as_fn_s(double r) const {
  check_r(r);
  const SigmaContext* self = this;
  std::vector<SmoothTestFn::Eval> d{[self, r](double s) { return self->sigma(r, std::sqrt(s)); }};
  return SmoothTestFn(std::move(d), [self, r](int n) { return self->series_in_s(r, n); },
                      s_scale(r), "sigma(s)");
}

SmoothTestFn SigmaContext::as_fn_b(double r) const {
  check_r(r);
  const SigmaContext* self = this;
  std::vector<SmoothTestFn::Eval> d{[self, r](double b) { return self->sigma(r, b); }};
  auto series = [self, r](int n) {
    const PowerSeries s = self->series_in_s(r, n / 2);
    PowerSeries out;
    out.coeffs.assign(n + 1, 0.0);
    out.majorant.assign(n + 1, 0.0);
    for (int j = 0; 2 * j <= n; ++j) {
      out.coeffs[2 * j] = s.coeffs[j];
      out.majorant[2 * j] = s.majorant[j];
    }
    return out;
  };
  return SmoothTestFn(std::move(d), series, std::sqrt(s_scale(r)), "sigma(b)");
}

double SigmaContext::mean_x_phi(double r) const {
  return 0.5 * finite_part_mellin(0.5 * (delta_ + 1.0), as_fn_s(r));
}

double SigmaContext::laplace(double r) const {
  return 0.5 * finite_part_mellin(0.5 * delta_, as_fn_s(r));
}

SigmaFunctional::SigmaFunctional(double delta, double a, std::optional<double> a_prime,
                                 const ExpFunctional& phi, double sl_tol) {
  if (phi.terms.empty()) throw DomainError("functional has no terms");
  ctx_.reserve(phi.terms.size());
  for (const auto& t : phi.terms) {
    coefs_.push_back(t.coef);
    ctx_.emplace_back(delta, a, a_prime, t.m, sl_tol);
  }
}

double SigmaFunctional::sigma(double r, double b) const {
  double v = 0.0;
  for (std::size_t i = 0; i < ctx_.size(); ++i) v += coefs_[i] * ctx_[i].sigma(r, b);
  return v;
}

PowerSeries SigmaFunctional::series_in_s(double r, int order) const {
  PowerSeries out;
  out.coeffs.assign(order + 1, 0.0);
  out.majorant.assign(order + 1, 0.0);
  for (std::size_t i = 0; i < ctx_.size(); ++i) {
    const PowerSeries s = series_scale(ctx_[i].series_in_s(r, order), coefs_[i]);
    for (int j = 0; j <= order; ++j) {
      out.coeffs[j] += s.coeffs[j];
      out.majorant[j] += s.majorant[j];
    }
  }
  return out;
}

SmoothTestFn SigmaFunctional::as_fn_s(double r) const {
  const SigmaFunctional* self = this;
  double scale = 0.0;
  for (const auto& c : ctx_) scale = std::max(scale, c.as_fn_s(r).scale());
  std::vector<SmoothTestFn::Eval> d{[self, r](double s) { return self->sigma(r, std::sqrt(s)); }};
  return SmoothTestFn(std::move(d), [self, r](int n) { return self->series_in_s(r, n); }, scale,
                      "sigma(s)");
}

SmoothTestFn SigmaFunctional::as_fn_b(double r) const {
  const SigmaFunctional* self = this;
  double scale = 0.0;
  for (const auto& c : ctx_) scale = std::max(scale, c.as_fn_b(r).scale());
  std::vector<SmoothTestFn::Eval> d{[self, r](double b) { return self->sigma(r, b); }};
  auto series = [self, r](int n) {
    const PowerSeries s = self->series_in_s(r, n / 2);
    PowerSeries out;
    out.coeffs.assign(n + 1, 0.0);
    out.majorant.assign(n + 1, 0.0);
    for (int j = 0; 2 * j <= n; ++j) {
      out.coeffs[2 * j] = s.coeffs[j];
      out.majorant[2 * j] = s.majorant[j];
    }
    return out;
  };
  return SmoothTestFn(std::move(d), series, scale, "sigma(b)");
}

double SigmaFunctional::mean_x_phi(double r) const {
  double v = 0.0;
  for (std::size_t i = 0; i < ctx_.size(); ++i) v += coefs_[i] * ctx_[i].mean_x_phi(r);
  return v;
}

double sigma_uncond(const SigmaContext& ctx, double r, double b) {
  if (ctx.bridge()) throw DomainError("context describes a bridge");
  return ctx.sigma(r, b);
}

double sigma_bridge(const SigmaContext& ctx, double r, double b) {
  if (!ctx.bridge()) throw DomainError("context has no end point");
  return ctx.sigma(r, b);
}

SmoothTestFn q_reg_test_fn(double delta, double t, double x) {
  std::vector<SmoothTestFn::Eval> d{
      [delta, t, x](double y) { return q_delta_t_reg(delta, t, x, y); }};
  auto series = [delta, t, x](int n) { return q_reg_series(delta, t, x, n); };
  const double scale = 2.0 * t + x + 2.0 * std::sqrt(2.0 * t * x);
  return SmoothTestFn(std::move(d), series, scale, "q_reg");
}

double zeta(double delta, double a, double t) {
  if (!(delta > 0.0)) throw DomainError("dimension must be positive");
  if (!(t > 0.0)) throw DomainError("time must be positive");
  if (!(a >= 0.0)) throw DomainError("starting point must be >= 0");
  const double lam = a * a / (2.0 * t);
  const double h = 0.5 * delta;
  auto moment = [h](double j) { return std::exp(std::lgamma(h + j + 0.5) - std::lgamma(h + j)); };
  if (lam == 0.0) return std::sqrt(2.0 * t) * moment(0.0);
  const int jmax = static_cast<int>(lam + 40.0 * std::sqrt(lam) + 60.0);
  double sum = 0.0;
  const double loglam = std::log(lam);
  for (int j = 0; j <= jmax; ++j) {
    const double lp = -lam + j * loglam - std::lgamma(j + 1.0);
    sum += std::exp(lp + std::lgamma(h + j + 0.5) - std::lgamma(h + j));
  }
  return std::sqrt(2.0 * t) * sum;
}

double zeta_quadrature(double delta, double a, double t) {
  auto f = [&](double b) { return b * p_delta_t(delta, t, a, b); };
  const double B = a + 10.0 * std::sqrt(t);
  QuadOptions opts;
  opts.rel_tol = 1e-13;
  std::vector<double> br{0.0};
  if (a > 0.0) br.push_back(a);
  br.push_back(B);
  const QuadResult head = integrate_breaks(f, br, opts);
  const QuadResult tail = integrate_to_infinity(f, B, std::sqrt(t), opts);
  if (!head.converged || !tail.converged) throw ConvergenceError("mean quadrature did not converge");
  return head.value + tail.value;
}

double zeta_second_deriv(double delta, double a, double t, ZetaRoute route) {
  if (!(t > 0.0)) throw DomainError("time must be positive");
  if (route == ZetaRoute::FiniteDifference) {
    const double z0 = zeta(delta, a, t);
    double d[3];
    const double hs[3] = {0.08 * t, 0.04 * t, 0.02 * t};
    for (int i = 0; i < 3; ++i) {
      const double h = hs[i];
      d[i] = (zeta(delta, a, t + h) - 2.0 * z0 + zeta(delta, a, t - h)) / (h * h);
    }
    return richardson3(d[0], d[1], d[2]);
  }
  const double alpha = 0.5 * (delta - 3.0);
  return -std::tgamma(0.5 * (delta + 1.0)) * mu_pair(alpha, q_reg_test_fn(delta, t, a * a));
}

}  // namespace bessel_lab
