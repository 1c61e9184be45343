#include <gtest/gtest.h>

#include <cmath>

#include "bessel_lab/sturm_liouville.hpp"

using namespace bessel_lab;

namespace {

double cosh_phi(double th, double r) { return std::cosh(th * (1 - r)) / std::cosh(th); }
double cosh_rho(double th, double r) {
  return std::pow(std::cosh(th), 2) * (std::tanh(th) - std::tanh(th * (1 - r))) / th;
}

}  // namespace

TEST(SturmLiouville, ZeroMeasure) {
  const auto s = solve_sl(FiniteMeasure::zero());
  for (double r : {0.0, 0.3, 1.0}) {
    EXPECT_DOUBLE_EQ(s.phi(r), 1.0);
    EXPECT_DOUBLE_EQ(s.rho(r), r);
  }
  EXPECT_EQ(s.dphi0(), 0.0);
}

TEST(SturmLiouville, CoshClosedForm) {
  for (double th : {0.5, 1.0, 2.0}) {
    const auto s = solve_sl(FiniteMeasure::constant_density(th * th / 2));
    for (double r : {0.0, 0.1, 0.5, 0.77, 1.0}) {
      EXPECT_NEAR(s.phi(r), cosh_phi(th, r), 1e-10) << th << " " << r;
      EXPECT_NEAR(s.rho(r), cosh_rho(th, r), 1e-10) << th << " " << r;
    }
    EXPECT_NEAR(s.dphi(1.0), 0.0, 1e-12);
  }
}

TEST(SturmLiouville, CoshBySeriesMatchesClosedForm) {
  SLOptions o;
  o.force_series = true;
  const auto s = solve_sl(FiniteMeasure::constant_density(0.5), 1e-12, o);
  for (double r : {0.2, 0.6, 1.0}) {
    EXPECT_NEAR(s.phi(r), cosh_phi(1.0, r), 1e-10);
    EXPECT_NEAR(s.rho(r), cosh_rho(1.0, r), 1e-10);
  }
}

TEST(SturmLiouville, AtomIsPiecewiseLinear) {
  const auto s = solve_sl(FiniteMeasure::dirac(0.5, 1.0));
  for (double r : {0.0, 0.2, 0.5}) EXPECT_NEAR(s.phi(r), 1.0 - r, 1e-12);
  for (double r : {0.6, 0.9, 1.0}) EXPECT_NEAR(s.phi(r), 0.5, 1e-12);
  EXPECT_NEAR(s.dphi0(), -1.0, 1e-12);
  for (double r : {0.5, 0.7, 1.0}) EXPECT_NEAR(s.rho(r), 1.0 + 4.0 * (r - 0.5), 1e-12);
  for (double r : {0.1, 0.4}) EXPECT_NEAR(s.rho(r), 1.0 / (1.0 - r) - 1.0, 1e-12);
}

TEST(SturmLiouville, AtomGeneralWeight) {
  const double lam = 2.5, t0 = 0.3;
  const double c = 2 * lam / (1 + 2 * lam * t0);
  const auto s = solve_sl(FiniteMeasure::dirac(t0, lam));
  EXPECT_NEAR(s.dphi0(), -c, 1e-12);
  EXPECT_NEAR(s.phi1(), 1 - c * t0, 1e-12);
}

TEST(SturmLiouville, AtomAtZeroJumps) {
  const auto s = solve_sl(FiniteMeasure::dirac(0.0, 1.0));
  EXPECT_DOUBLE_EQ(s.phi(0.5), 1.0);
  EXPECT_NEAR(s.dphi0_left(), -2.0, 1e-12);
}

TEST(SturmLiouville, MonotoneAndPositive) {
  FiniteMeasure m({{0.25, 0.4}, {0.7, 1.1}}, {{0.1, 0.9, {0.3, 1.0, -0.5}}});
  const auto s = solve_sl(m);
  double prev = 1.0;
  for (int i = 1; i <= 200; ++i) {
    const double r = i / 200.0;
    EXPECT_GT(s.phi(r), 0.0);
    EXPECT_LE(s.phi(r), prev + 1e-15);
    EXPECT_LE(s.dphi(r), 1e-14);
    prev = s.phi(r);
  }
  EXPECT_LT(s.residual(), 1e-10);
}

TEST(SturmLiouville, RefinementStability) {
  FiniteMeasure m({{0.4, 0.3}}, {{0.0, 1.0, {0.2, 0.5, 0.8}}});
  SLOptions coarse, fine;
  coarse.max_step = 1.0 / 16;
  fine.max_step = 1.0 / 128;
  const auto a = solve_sl(m, 1e-12, coarse), b = solve_sl(m, 1e-12, fine);
  for (double r : {0.1, 0.4, 0.8, 1.0}) {
    EXPECT_NEAR(a.phi(r), b.phi(r), 1e-11);
    EXPECT_NEAR(a.rho(r), b.rho(r), 1e-11);
  }
}
