#include <gtest/gtest.h>

#include <cmath>

#include "bessel_lab/errors.hpp"
#include "bessel_lab/quadrature.hpp"
#include "bessel_lab/spde_sim.hpp"
#include "bessel_lab/stats.hpp"

using namespace bessel_lab;

TEST(Covariance, StationaryLimit) {
  const auto q = covariance_q(INFINITY, 0.5, 0.5, 512);
  EXPECT_NEAR(q.value, 0.25, 1e-6);
  EXPECT_NEAR(covariance_q(INFINITY, 0.2, 0.7, 64).value, 0.2 - 0.14, 1e-15);
  EXPECT_EQ(covariance_q(0.0, 0.3, 0.4, 64).value, 0.0);
}

TEST(Covariance, FiniteTimeIsSumOfModes) {
  const double t = 0.01, x = 0.3, xp = 0.45;
  double direct = 0.0;
  for (int k = 1; k <= 2000; ++k) {
    const double l = mode_eigenvalue(k);
    direct += -std::expm1(-l * t) / l * 2 * std::sin(k * M_PI * x) * std::sin(k * M_PI * xp);
  }
  const auto q = covariance_q(t, x, xp, 256);
  EXPECT_NEAR(q.value, direct, q.truncation_bound + 1e-6);
  EXPECT_NEAR(covariance_q(t, x, xp, 2000).value + covariance_q_tail(t, x, xp, 2000).value,
              covariance_q(INFINITY, x, xp, 2000).value, 1e-6);
}

TEST(Covariance, TailDecreasesInTime) {
  double prev = INFINITY;
  for (double t : {0.0, 0.001, 0.01, 0.05, 0.1, 0.5, 1.0}) {
    const double v = covariance_q_tail(t, 0.4, 0.4, 256).value;
    EXPECT_LE(v, prev + 1e-12);
    prev = v;
  }
}

TEST(OuStep, StationaryVarianceAndAutocovariance) {
  const int K = 8, chains = 4000, steps = 20;
  const double dt = 0.002;
  const OuStepper step(K, dt);
  std::vector<std::vector<double>> end(K), cross(K);
  for (int c = 0; c < chains; ++c) {
    RngStream rng(123, c);
    SpectralField f = stationary_field(K, rng);
    const auto start = f.coeffs[0];
    for (int s = 0; s < steps; ++s) step.step(f, rng);
    for (int k = 0; k < K; ++k) {
      end[k].push_back(f.coeffs[0][k] * f.coeffs[0][k]);
      cross[k].push_back(start[k] * f.coeffs[0][k]);
    }
  }
  for (int k = 0; k < K; ++k) {
    const double l = mode_eigenvalue(k + 1);
    const auto v = mean_stderr(end[k]), c = mean_stderr(cross[k]);
    EXPECT_NEAR(v.mean, 1 / l, 4 * v.std_error) << k;
    EXPECT_NEAR(c.mean, std::exp(-l * steps * dt / 2) / l, 4 * c.std_error) << k;
  }
}

TEST(OuStep, LargeStepResamples) {
  RngStream rng(4);
  SpectralField f = stationary_field(4, rng);
  std::vector<double> x;
  for (int i = 0; i < 5000; ++i) {
    f = ou_step(f, 1e6, rng);
    x.push_back(f.coeffs[1][0] * M_PI);
  }
  EXPECT_GT(ks_one_sample(x, [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }).p_value, 0.01);
}

TEST(FieldToU, NonnegativeAndPinned) {
  RngStream rng(8);
  const GridMesh mesh(65);
  const auto u = field_to_u(stationary_field(64, rng), mesh);
  for (double v : u.values()) EXPECT_GE(v, 0.0);
  EXPECT_NEAR(u[0], 0.0, 1e-12);
  EXPECT_NEAR(u[64], 0.0, 1e-12);
}

TEST(FieldToU, StationaryMarginal) { EXPECT_GT(stationary_marginal_ks(0.5, 256, 10000, 2024), 0.01); }

TEST(Mollifier, NormalisedAndSymmetric) {
  const Mollifier rho(0.01);
  QuadOptions o;
  o.abs_tol = 1e-13;
  EXPECT_NEAR(integrate(rho, -0.01, 0.01, o).value, 1.0, 1e-10);
  EXPECT_NEAR(integrate(rho, 0.0, 0.01, o).value, 0.5, 1e-10);
  EXPECT_EQ(rho(0.003), rho(-0.003));
  EXPECT_EQ(rho(0.011), 0.0);
}

TEST(FEpsEta, Values) {
  const double eps = 0.05, eta = 0.01;
  EXPECT_NEAR(f_eps_eta(2 * eps, eps, eta), 1 / (32 * eps * eps * eps), 1e-9);
  for (double x : {0.011, 0.03, 0.0499}) EXPECT_EQ(f_eps_eta(x, eps, eta), 0.0);
  EXPECT_EQ(f_eps_eta(0.0, eps, eta), 0.0);
  EXPECT_LT(f_eps_eta(0.005, eps, eta), 0.0);
  EXPECT_THROW(f_eps_eta(0.1, 0.01, 0.02), DomainError);
}

TEST(GammaRs, DeterminantBound) {
  const double th = 0.2;
  for (double t : {0.01, 0.1, 1.0}) {
    for (int i = 0; i < 20; ++i) {
      for (int j = 0; j < 20; ++j) {
        const double r = th + (1 - 2 * th) * i / 19.0, s = th + (1 - 2 * th) * j / 19.0;
        const auto g = gamma_rs(r, s, t, th, 512);
        EXPECT_TRUE(g.holds) << r << " " << s << " " << t;
        EXPECT_EQ(g.m[0][1], g.m[1][0]);
      }
    }
  }
}

TEST(GammaRs, DegenerateAtTimeZero) {
  const auto g = gamma_rs(0.4, 0.4, 0.0, 0.2, 512);
  EXPECT_NEAR(g.det, 0.0, 1e-12);
}

TEST(Decomposition, ShortRunIsFiniteAndConsistent) {
  DecompositionConfig cfg;
  cfg.K = 32;
  cfg.dt = 1e-4;
  cfg.T = 0.01;
  cfg.mesh_points = 65;
  cfg.record_every = 10;
  RngStream rng(6);
  const auto s = run_decomposition(TestFunctionC2c::bump(0.2), cfg, rng);
  ASSERT_EQ(s.t.size(), s.m.size());
  EXPECT_EQ(s.m.front(), 0.0);
  EXPECT_EQ(s.n.front(), 0.0);
  EXPECT_NEAR(s.t.back(), cfg.T, 1e-12);
  for (double v : s.m) EXPECT_TRUE(std::isfinite(v));
}

TEST(Decomposition, DiagnosticsDeterministicAcrossJobs) {
  DecompositionConfig cfg;
  cfg.K = 16;
  cfg.dt = 1e-4;
  cfg.T = 0.004;
  cfg.mesh_points = 33;
  cfg.record_every = 5;
  const auto h = TestFunctionC2c::bump(0.2);
  const auto a = spde_diagnostics(h, cfg, 8, 1, 1, 4), b = spde_diagnostics(h, cfg, 8, 1, 3, 4);
  EXPECT_EQ(a.bracket_ratio, b.bracket_ratio);
  EXPECT_EQ(a.reg_coef, b.reg_coef);
}
