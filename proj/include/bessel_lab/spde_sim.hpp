#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "bessel_lab/core_model.hpp"
#include "bessel_lab/rng.hpp"

namespace bessel_lab {

// Two-component field in the sine basis e_k(x) = sqrt(2) sin(k pi x), k = 1..K.
struct SpectralField {
  int K = 0;
  std::array<std::vector<double>, 2> coeffs;
  double time = 0.0;
};

inline double mode_eigenvalue(int k) { return k * k * M_PI * M_PI; }

SpectralField stationary_field(int K, RngStream& rng);

struct CovarianceValue {
  double value = 0.0;
  double truncation_bound = 0.0;  // bound on the dropped modes k > K
};

// q_t(x, x') = sum_k (1 - e^{-lambda_k t}) / lambda_k e_k(x) e_k(x'); t = +inf gives x ^ x' - x x'.
CovarianceValue covariance_q(double t, double x, double xp, int K);
// q^t = q_inf - q_t = sum_k e^{-lambda_k t} / lambda_k e_k(x) e_k(x')
CovarianceValue covariance_q_tail(double t, double x, double xp, int K);

// Exact per-mode update: c <- e^{-lambda dt / 2} c + N(0, (1 - e^{-lambda dt}) / lambda).
SpectralField ou_step(SpectralField field, double dt, RngStream& rng);

class OuStepper {
 public:
  OuStepper(int K, double dt);
  void step(SpectralField& field, RngStream& rng) const;
  double dt() const { return dt_; }

 private:
  int K_;
  double dt_;
  std::vector<double> decay_, sd_;
};

// Sine synthesis of u = |v| on a mesh; precomputes the K x n table.
class FieldSynth {
 public:
  FieldSynth(int K, const GridMesh& mesh);
  std::vector<double> norm(const SpectralField& field) const;
  std::vector<double> component(const SpectralField& field, int c) const;
  const GridMesh& mesh() const { return mesh_; }

 private:
  int K_;
  GridMesh mesh_;
  std::vector<double> table_;  // row-major, mesh point by mode
};

Path field_to_u(const SpectralField& field, const GridMesh& mesh);

// rho(y) = C exp(-1 / (1 - y^2)) on (-1, 1), rho_eta(x) = rho(x / eta) / eta
class Mollifier {
 public:
  explicit Mollifier(double eta);
  static double profile(double y);
  static double normaliser();  // C
  double operator()(double x) const;
  double eta() const { return eta_; }

 private:
  double eta_;
};

// 1/4 (1{x >= eps} / x^3 - (2 / eps) rho_eta(x) / x); f(0) is taken to be 0.
double f_eps_eta(double x, double eps, double eta);

struct DecompositionConfig {
  int K = 256;
  double dt = 1e-5;
  double T = 0.05;
  double eps = 0.05;
  double eta = 0.01;
  int mesh_points = 257;
  int record_every = 50;
  std::vector<double> extra_eta;  // further eta values tracked on the same path
};

struct DecompositionSeries {
  std::vector<double> t;
  std::vector<double> uh;  // <u_t, h>
  std::vector<double> n;   // N^{eps,eta}_t
  std::vector<double> m;   // M_t
  std::vector<std::vector<double>> n_extra;
  std::vector<double> u_mid_start, u_mid_end;  // u(1/2) at t = 0 and T
};

DecompositionSeries run_decomposition(const TestFunctionC2c& h, const DecompositionConfig& cfg,
                                      RngStream& rng);

struct GammaRs {
  double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  double det = 0.0;
  double bound = 0.0;  // theta^2 |r - s|
  double slack = 0.0;  // from the spectral truncation
  bool holds = false;
};
GammaRs gamma_rs(double r, double s, double t, double theta, int K);

struct SpdeDiagnostics {
  int replicas = 0;
  double h_l2_sq = 0.0;
  double bracket_ratio = 0.0;
  double bracket_ratio_stderr = 0.0;
  std::vector<double> reg_coef, reg_stderr;  // intercept, <u_t,h>, N_t
  double ks_stationarity_p = 0.0;           // <u_0,h> vs <u_T,h>
  std::vector<DecompositionSeries> series;
};

SpdeDiagnostics spde_diagnostics(const TestFunctionC2c& h, const DecompositionConfig& cfg,
                                 int replicas, std::uint64_t seed, int jobs = 1,
                                 int increment_blocks = 10);

// KS p-value of u(r) under the stationary field against the delta = 2 bridge marginal.
double stationary_marginal_ks(double r, int K, int samples, std::uint64_t seed);

}  // namespace bessel_lab
