#include "bessel_lab/stats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "bessel_lab/errors.hpp"
#include "bessel_lab/quadrature.hpp"

namespace bessel_lab {
namespace {

double stephens_p(double d, double n_eff) {
  const double sn = std::sqrt(n_eff);
  return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

}  // namespace

double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  if (lambda < 1.18) {
    // small-lambda form: 1 - sqrt(2 pi)/lambda sum exp(-(2k-1)^2 pi^2 / (8 lambda^2))
    double s = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double e = (2.0 * k - 1.0) * M_PI / lambda;
      s += std::exp(-e * e / 8.0);
    }
    return std::clamp(1.0 - std::sqrt(2.0 * M_PI) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? 1.0 : -1.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw DomainError("KS test needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return {d, stephens_p(d, n), static_cast<long>(samples.size())};
}

KsResult ks_one_sample_density(std::vector<double> samples,
                               const std::function<double(double)>& density, double lo) {
  if (samples.empty()) throw DomainError("KS test needs samples");
  std::sort(samples.begin(), samples.end());
  QuadOptions opts;
  opts.abs_tol = 1e-13;
  opts.rel_tol = 1e-10;
  std::vector<double> cdf(samples.size());
  double acc = 0.0, prev = lo;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double x = std::max(samples[i], lo);
    if (x > prev) acc += integrate(density, prev, x, opts).value;
    cdf[i] = acc;
    prev = x;
  }
  std::size_t i = 0;
  return ks_one_sample(samples, [&](double) { return cdf[i++]; });
}

KsResult ks_two_sample(std::vector<double> x, std::vector<double> y) {
  if (x.empty() || y.empty()) throw DomainError("KS test needs samples");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(i / n - j / m));
  }
  return {d, stephens_p(d, n * m / (n + m)), static_cast<long>(x.size() + y.size())};
}

MeanStderr mean_stderr(const std::vector<double>& v) {
  MeanStderr out;
  if (v.empty()) return out;
  double mean = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double d = v[k] - mean;
    mean += d / (k + 1.0);
    m2 += d * (v[k] - mean);
  }
  out.mean = mean;
  if (v.size() > 1) {
    out.variance = m2 / (v.size() - 1.0);
    out.std_error = std::sqrt(out.variance / v.size());
  }
  return out;
}

Regression ols(const std::vector<std::vector<double>>& regressors, const std::vector<double>& y) {
  const long n = static_cast<long>(y.size());
  const long p = static_cast<long>(regressors.size()) + 1;
  if (n <= p) throw DomainError("regression needs more observations than coefficients");
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd Y(n);
  for (long i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    for (long j = 1; j < p; ++j) {
      if (static_cast<long>(regressors[j - 1].size()) != n) throw DomainError("regressor length mismatch");
      X(i, j) = regressors[j - 1][i];
    }
    Y(i) = y[i];
  }
  const auto qr = X.colPivHouseholderQr();
  const Eigen::VectorXd b = qr.solve(Y);
  const Eigen::VectorXd res = Y - X * b;
  const double s2 = res.squaredNorm() / static_cast<double>(n - p);
  const Eigen::MatrixXd cov = (X.transpose() * X).inverse() * s2;
  Regression out;
  out.residual_variance = s2;
  for (long j = 0; j < p; ++j) {
    out.coef.push_back(b(j));
    out.std_error.push_back(std::sqrt(std::max(0.0, cov(j, j))));
  }
  return out;
}

}  // namespace bessel_lab
