#pragma once

#include <functional>
#include <vector>

namespace bessel_lab {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  long n = 0;
};

// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

// One-sample test against a CDF.
KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf);

// One-sample test against a density on [lo, inf): the CDF at the sorted samples is
// accumulated by quadrature between consecutive points.
KsResult ks_one_sample_density(std::vector<double> samples,
                               const std::function<double(double)>& density, double lo = 0.0);

KsResult ks_two_sample(std::vector<double> x, std::vector<double> y);

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
  double variance = 0.0;
};
MeanStderr mean_stderr(const std::vector<double>& v);

// Least squares y ~ b0 + sum_j b_j x_j with classical standard errors.
struct Regression {
  std::vector<double> coef;
  std::vector<double> std_error;
  double residual_variance = 0.0;
};
Regression ols(const std::vector<std::vector<double>>& regressors, const std::vector<double>& y);

}  // namespace bessel_lab
