#include <gtest/gtest.h>

#include <cmath>

#include "bessel_lab/laplace_sigma.hpp"
#include "bessel_lab/quadrature.hpp"
#include "bessel_lab/specfun.hpp"

using namespace bessel_lab;

namespace {

double rel(double x, double y) { return std::abs(x - y) / std::abs(y); }

FiniteMeasure half_leb() { return FiniteMeasure::constant_density(0.5); }

// a = a' = 0, m = (theta^2/2) Leb
double sigma_cosh_closed(double delta, double theta, double r, double b) {
  const double p1 = 1.0 / std::cosh(theta);
  const double pr = std::cosh(theta * (1 - r)) / std::cosh(theta);
  auto rho = [&](double u) {
    return std::pow(std::cosh(theta), 2) * (std::tanh(theta) - std::tanh(theta * (1 - u))) / theta;
  };
  const double rr = rho(r), r1 = rho(1.0);
  const double v = pr * pr * rr * (r1 - rr);
  return std::pow(2.0, 1 - delta / 2) / std::tgamma(delta / 2) * std::pow(v * p1, -delta / 2) *
         std::exp(-b * b * r1 / (2 * v));
}

}  // namespace

TEST(Sigma, ZeroMeasureBridgeIsDensityRatio) {
  for (double d : {0.5, 1.5, 2.0, 3.0}) {
    const SigmaContext ctx(d, 0.0, 0.0, FiniteMeasure::zero());
    for (double r : {0.2, 0.5}) {
      for (double b : {0.1, 0.6, 1.4}) {
        const double p = std::pow(b, d - 1) /
                         (std::pow(2.0, d / 2 - 1) * std::tgamma(d / 2) * std::pow(r * (1 - r), d / 2)) *
                         std::exp(-b * b / (2 * r * (1 - r)));
        EXPECT_LT(rel(ctx.sigma(r, b) * std::pow(b, d - 1), p), 1e-12) << d;
      }
    }
  }
}

TEST(Sigma, ZeroMeasureMatchesBridgeDensity) {
  const SigmaContext ctx(1.5, 1.0, 2.0, FiniteMeasure::zero());
  for (double b : {0.3, 1.0, 2.2}) {
    EXPECT_LT(rel(ctx.sigma(0.3, b) * std::pow(b, 0.5), bridge_density(1.5, 0.3, 1.0, 2.0, b)), 1e-12);
  }
}

TEST(Sigma, UnconditionedAtZeroStart) {
  const double d = 2.5;
  const SigmaContext ctx(d, 0.0, std::nullopt, half_leb());
  const auto& s = ctx.sl();
  for (double r : {0.3, 0.8}) {
    for (double b : {0.2, 1.0, 1.9}) {
      const double pr = s.phi(r);
      const double want = 2 * std::pow(s.phi1(), d / 2) * std::pow(pr, -d) *
                          q_delta_t_reg(d, s.rho(r), 0.0, b * b / (pr * pr));
      EXPECT_LT(rel(ctx.sigma(r, b), want), 1e-12);
    }
  }
}

TEST(Sigma, CoshReduction) {
  for (double d : {1.0, 2.5, 3.5}) {
    for (double th : {0.7, 1.5}) {
      const SigmaContext ctx(d, 0.0, 0.0, FiniteMeasure::constant_density(th * th / 2));
      for (double r : {0.25, 0.6}) {
        for (double b : {0.0, 0.4, 1.3}) {
          EXPECT_LT(rel(ctx.sigma(r, b), sigma_cosh_closed(d, th, r, b)), 1e-10) << d << " " << th;
        }
      }
    }
  }
}

TEST(Sigma, ConditioningIdentity) {
  struct C {
    double d, a;
    FiniteMeasure m;
  };
  for (const C& c : {C{1.5, 1.0, FiniteMeasure::dirac(0.6)}, C{2.5, 0.0, half_leb()},
                     C{3.5, 1.0, FiniteMeasure::zero()}}) {
    const SigmaContext uncond(c.d, c.a, std::nullopt, c.m);
    for (double r : {0.3, 0.7}) {
      for (double b : {0.4, 1.2}) {
        auto f = [&](double ap) {
          return SigmaContext(c.d, c.a, ap, c.m).sigma(r, b) * p_delta_t(c.d, 1.0, c.a, ap);
        };
        QuadOptions o;
        o.abs_tol = 1e-12;
        o.rel_tol = 1e-10;
        const double v = integrate(f, 0.0, 3.0, o).value + integrate_to_infinity(f, 3.0, 2.0, o).value;
        EXPECT_LT(rel(v, uncond.sigma(r, b)), 1e-7) << c.d << " " << r << " " << b;
      }
    }
  }
}

TEST(Sigma, EvenInB) {
  const SigmaContext ctx(1.5, 1.0, 2.0, FiniteMeasure::dirac(0.6));
  for (double r : {0.3, 0.6, 0.9}) {
    const double h = 1e-3;
    const double d1 = (ctx.sigma(r, h) - ctx.sigma(r, 0.0)) / h;
    const double d2 = (ctx.sigma(r, h / 2) - ctx.sigma(r, 0.0)) / (h / 2);
    EXPECT_LT(std::abs(2 * d2 - d1), 1e-8 * std::max(1.0, ctx.sigma(r, 0.0)));
  }
}

TEST(Sigma, SeriesAgreesWithRichardson) {
  const SigmaContext ctx(2.5, 1.0, 0.5, FiniteMeasure::dirac(0.6));
  const auto s = ctx.series_in_s(0.4, 2);
  const auto rch = ctx.series_in_s_richardson(0.4, 2);
  ASSERT_GE(rch.size(), 2u);
  EXPECT_LT(rel(s.coeffs[0], ctx.sigma(0.4, 0.0)), 1e-13);
  for (int k = 0; k < 2; ++k) EXPECT_NEAR(s.coeffs[k], rch[k], 1e-5 * (1 + std::abs(s.coeffs[k]))) << k;
}

TEST(Sigma, MeanOfDelta3Bridge) {
  const SigmaContext ctx(3.0, 0.0, 0.0, FiniteMeasure::zero());
  for (double r : {0.2, 0.5, 0.85}) {
    EXPECT_LT(rel(ctx.mean_x_phi(r), std::sqrt(2 * r * (1 - r)) * 2 / std::sqrt(M_PI)), 1e-9);
  }
}

TEST(Sigma, LaplaceIsOneForZeroMeasure) {
  const SigmaContext ctx(1.5, 1.0, 2.0, FiniteMeasure::zero());
  EXPECT_NEAR(ctx.laplace(0.5), 1.0, 1e-9);
}

TEST(Zeta, GammaMoments) {
  EXPECT_NEAR(zeta(2.0, 0.0, 0.5), std::sqrt(M_PI) / 2, 1e-12);
  EXPECT_NEAR(zeta(3.0, 0.0, 1.0), 2 * std::sqrt(2.0) / std::sqrt(M_PI), 1e-12);
  // 40-digit reference
  EXPECT_LT(rel(zeta(1.3, 0.8, 0.5), 0.9768111864973121643520251521173225570435), 1e-12);
  EXPECT_LT(rel(zeta_quadrature(1.3, 0.8, 0.5), zeta(1.3, 0.8, 0.5)), 1e-9);
}

TEST(Zeta, SecondDerivativeClosedForm) {
  const double d = 2.5, t = 0.7;
  const double want = -std::sqrt(2.0) / 4 * std::pow(t, -1.5) * std::tgamma((d + 1) / 2) / std::tgamma(d / 2);
  EXPECT_LT(rel(zeta_second_deriv(d, 0.0, t, ZetaRoute::FinitePart), want), 1e-5);
  EXPECT_LT(rel(zeta_second_deriv(d, 0.0, t, ZetaRoute::FiniteDifference), want), 1e-5);
}

TEST(Zeta, RoutesAgree) {
  const double ref = -0.04840419887962173599849958696712931901086;
  EXPECT_LT(rel(zeta_second_deriv(1.3, 0.8, 0.5, ZetaRoute::FinitePart), ref), 1e-8);
  EXPECT_LT(rel(zeta_second_deriv(1.3, 0.8, 0.5, ZetaRoute::FiniteDifference), ref), 1e-4);
}

TEST(Zeta, Delta3FinitePartIsPointValue) {
  const double t = 0.6, a = 0.9;
  const double f0 = std::pow(2 * t, -1.5) / std::tgamma(1.5) * std::exp(-a * a / (2 * t));
  EXPECT_LT(rel(zeta_second_deriv(3.0, a, t, ZetaRoute::FinitePart), -f0), 1e-12);
}
