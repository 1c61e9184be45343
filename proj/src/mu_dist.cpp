#include "bessel_lab/mu_dist.hpp"

#include <cmath>
#include <sstream>

#include "bessel_lab/errors.hpp"
#include "bessel_lab/quadrature.hpp"

namespace bessel_lab {

SmoothTestFn::SmoothTestFn(std::vector<Eval> derivs, SeriesGen series, double scale,
                           std::string name)
    : derivs_(std::move(derivs)), series_(std::move(series)), scale_(scale), name_(std::move(name)) {
  if (derivs_.empty() || !derivs_[0]) throw DomainError("test function needs a value evaluator");
  if (!(scale_ > 0.0)) throw DomainError("test function scale must be positive");
}

double SmoothTestFn::derivative(int k, double x) const {
  if (k < 0 || k >= static_cast<int>(derivs_.size()) || !derivs_[k]) {
    throw DomainError("derivative order not available for this test function");
  }
  return derivs_[k](x);
}

int SmoothTestFn::available_derivatives() const {
  int n = 0;
  while (n < static_cast<int>(derivs_.size()) && derivs_[n]) ++n;
  return n - 1;
}

SmoothTestFn SmoothTestFn::exp_decay(double lambda) {
  if (!(lambda > 0.0)) throw DomainError("decay rate must be positive");
  std::vector<Eval> d;
  for (int k = 0; k <= 4; ++k) {
    d.push_back([lambda, k](double x) { return std::pow(-lambda, k) * std::exp(-lambda * x); });
  }
  auto series = [lambda](int n) {
    PowerSeries s;
    double c = 1.0;
    for (int j = 0; j <= n; ++j) {
      s.coeffs.push_back(c);
      s.majorant.push_back(std::abs(c));
      c *= -lambda / (j + 1);
    }
    return s;
  };
  std::ostringstream os;
  os << "exp(-" << lambda << "x)";
  return SmoothTestFn(std::move(d), series, 1.0 / lambda, os.str());
}

SmoothTestFn SmoothTestFn::gaussian() {
  std::vector<Eval> d{
      [](double x) { return std::exp(-x * x); },
      [](double x) { return -2.0 * x * std::exp(-x * x); },
      [](double x) { return (4.0 * x * x - 2.0) * std::exp(-x * x); },
      [](double x) { return (-8.0 * x * x * x + 12.0 * x) * std::exp(-x * x); },
      [](double x) { return (16.0 * x * x * x * x - 48.0 * x * x + 12.0) * std::exp(-x * x); },
  };
  auto series = [](int n) {
    PowerSeries s;
    s.coeffs.assign(n + 1, 0.0);
    double c = 1.0;
    for (int m = 0; 2 * m <= n; ++m) {
      s.coeffs[2 * m] = c;
      c *= -1.0 / (m + 1);
    }
    for (double v : s.coeffs) s.majorant.push_back(std::abs(v));
    return s;
  };
  return SmoothTestFn(std::move(d), series, 1.0, "exp(-x^2)");
}

SmoothTestFn SmoothTestFn::polynomial_damped(std::vector<double> poly, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("decay rate must be positive");
  // derivative k of p(x) e^{-lambda x}: sum_i C(k,i) p^{(i)}(x) (-lambda)^{k-i} e^{-lambda x}
  auto poly_deriv = [](const std::vector<double>& p, int i, double x) {
    double v = 0.0;
    for (std::size_t j = p.size(); j-- > static_cast<std::size_t>(i);) {
      double f = 1.0;
      for (int q = 0; q < i; ++q) f *= static_cast<double>(j - q);
      v = v * x + f * p[j];
    }
    return v;
  };
  std::vector<Eval> d;
  for (int k = 0; k <= 4; ++k) {
    d.push_back([poly, lambda, k, poly_deriv](double x) {
      double total = 0.0;
      double binom = 1.0;
      for (int i = 0; i <= k; ++i) {
        total += binom * poly_deriv(poly, i, x) * std::pow(-lambda, k - i);
        binom = binom * (k - i) / (i + 1);
      }
      return total * std::exp(-lambda * x);
    });
  }
  auto series = [poly, lambda](int n) {
    PowerSeries e;
    double c = 1.0;
    for (int j = 0; j <= n; ++j) {
      e.coeffs.push_back(c);
      e.majorant.push_back(std::abs(c));
      c *= -lambda / (j + 1);
    }
    PowerSeries p;
    p.coeffs.assign(n + 1, 0.0);
    for (std::size_t j = 0; j < poly.size() && static_cast<int>(j) <= n; ++j) p.coeffs[j] = poly[j];
    for (double v : p.coeffs) p.majorant.push_back(std::abs(v));
    return series_product(p, e);
  };
  const double scale = (1.0 + static_cast<double>(poly.size())) / lambda;
  return SmoothTestFn(std::move(d), series, scale, "poly*exp");
}

SmoothTestFn SmoothTestFn::linear_exp() {
  SmoothTestFn f = polynomial_damped({1.0, 1.0}, 2.0);
  f.name_ = "(1+x)exp(-2x)";
  return f;
}

SmoothTestFn SmoothTestFn::by_name(const std::string& name, double lambda) {
  if (name == "exp") return exp_decay(lambda);
  if (name == "gauss") return gaussian();
  if (name == "linexp") return linear_exp();
  throw DomainError("unknown test function '" + name + "' (expected exp, gauss or linexp)");
}

SmoothTestFn SmoothTestFn::derivative_fn() const {
  std::vector<Eval> d(derivs_.begin() + 1, derivs_.end());
  if (d.empty() || !d[0]) throw DomainError("no derivative evaluator available");
  auto base = series_;
  auto series = [base](int n) {
    PowerSeries s = base(n + 1);
    PowerSeries out;
    for (int j = 0; j <= n; ++j) {
      out.coeffs.push_back((j + 1) * s.coeffs[j + 1]);
      out.majorant.push_back((j + 1) * s.majorant[j + 1]);
    }
    return out;
  };
  return SmoothTestFn(std::move(d), series, scale_, name_ + "'");
}

SmoothTestFn SmoothTestFn::times_x() const {
  std::vector<Eval> d;
  const auto base = derivs_;
  for (std::size_t k = 0; k < derivs_.size() && derivs_[k]; ++k) {
    d.push_back([base, k](double x) {
      double v = x * base[k](x);
      if (k > 0) v += static_cast<double>(k) * base[k - 1](x);
      return v;
    });
  }
  auto s0 = series_;
  auto series = [s0](int n) {
    PowerSeries s = s0(n);
    PowerSeries out;
    out.coeffs.push_back(0.0);
    out.majorant.push_back(0.0);
    for (int j = 1; j <= n; ++j) {
      out.coeffs.push_back(s.coeffs[j - 1]);
      out.majorant.push_back(s.majorant[j - 1]);
    }
    return out;
  };
  return SmoothTestFn(std::move(d), series, scale_ * 1.5, "x*" + name_);
}

double taylor_remainder(const SmoothTestFn& f, int n, double x) {
  if (n > 4) throw DomainError("Taylor remainder supported up to order 4");
  if (x < 0.0) throw DomainError("Taylor remainder needs x >= 0");
  double v = f(x);
  double pw = 1.0;
  double fact = 1.0;
  for (int j = 0; j <= n; ++j) {
    if (j > 0) {
      pw *= x;
      fact *= j;
    }
    v -= pw * f.derivative(j, 0.0) / fact;
  }
  return v;
}

namespace {

constexpr int kSeriesOrder = 40;

}  // namespace

double finite_part_mellin(double alpha, const SmoothTestFn& f) {
  const int k = alpha > 0.0 ? -1 : static_cast<int>(std::floor(-alpha));
  if (alpha <= 0.0 && std::abs(alpha + k) < kIntegerGuard) {
    throw DomainError("finite-part integral has a pole at nonpositive integer alpha");
  }
  const PowerSeries ps = f.series(kSeriesOrder);
  const auto& c = ps.coeffs;
  const auto& M = ps.majorant;
  const int N = static_cast<int>(c.size()) - 1;

  // largest x0 <= scale on which the truncated series is exact to rounding
  double x0 = f.scale();
  for (int it = 0; it < 200; ++it) {
    double total = 0.0, pw = 1.0;
    std::vector<double> terms(N + 1);
    for (int j = 0; j <= N; ++j) {
      terms[j] = M[j] * pw;
      total += terms[j];
      pw *= x0;
    }
    if (terms[N] + terms[N - 1] + terms[N - 2] <= 1e-19 * total) break;
    x0 *= 0.7;
  }

  double near = 0.0;
  double magnitude = 0.0;
  for (int j = 0; j <= N; ++j) {
    const double term = c[j] * std::pow(x0, j + alpha) / (j + alpha);
    magnitude += M[j] * std::pow(x0, j + alpha) / std::abs(j + alpha);
    if (j > k) near += term;
  }

  auto poly = [&](double x) {
    double v = 0.0;
    for (int j = k; j >= 0; --j) v = v * x + c[j];
    return v;
  };
  const double B = std::max(2.0 * x0, 4.0 * f.scale());
  std::vector<double> breaks{x0};
  while (breaks.back() * 2.0 < B) breaks.push_back(breaks.back() * 2.0);
  breaks.push_back(B);

  QuadOptions opts;
  opts.rel_tol = 1e-13;
  opts.abs_tol = 1e-16 * magnitude;
  const QuadResult mid = integrate_breaks(
      [&](double x) { return (f(x) - (k >= 0 ? poly(x) : 0.0)) * std::pow(x, alpha - 1.0); },
      breaks, opts);
  const QuadResult tail = integrate_to_infinity(
      [&](double x) { return f(x) * std::pow(x, alpha - 1.0); }, B, f.scale(), opts);
  // the strict targets can stall on roundoff; only a clearly large error is fatal
  const double err = mid.abs_error + tail.abs_error;
  const double bar = 1e3 * std::max(opts.abs_tol, opts.rel_tol * std::abs(mid.value + tail.value));
  if (!std::isfinite(mid.value + tail.value) || ((!mid.converged || !tail.converged) && err > bar)) {
    std::ostringstream os;
    os << "finite-part quadrature did not converge (alpha=" << alpha << ", fn=" << f.name()
       << ", x0=" << x0 << ", B=" << B << ", err=" << err << ")";
    throw ConvergenceError(os.str());
  }
  double poly_tail = 0.0;
  for (int j = 0; j <= k; ++j) poly_tail += c[j] * std::pow(B, j + alpha) / (j + alpha);
  return near + mid.value + tail.value + poly_tail;
}

double mu_pair(double alpha, const SmoothTestFn& f) {
  if (!(alpha >= -4.0 && alpha <= 5.0)) throw DomainError("alpha outside the supported range [-4, 5]");
  const double rounded = std::round(alpha);
  if (rounded <= 0.0 && std::abs(alpha - rounded) < kIntegerGuard) {
    const int k = static_cast<int>(-rounded);
    double deriv;
    if (f.available_derivatives() >= k) {
      deriv = f.derivative(k, 0.0);
    } else {
      const PowerSeries s = f.series(k);
      deriv = s.coeffs[k] * std::tgamma(k + 1.0);
    }
    return (k % 2 == 0 ? 1.0 : -1.0) * deriv;
  }
  return finite_part_mellin(alpha, f) / std::tgamma(alpha);
}

}  // namespace bessel_lab
