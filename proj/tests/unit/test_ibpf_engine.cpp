#include <gtest/gtest.h>

#include <cmath>

#include "bessel_lab/ibpf_engine.hpp"
#include "bessel_lab/laplace_sigma.hpp"
#include "bessel_lab/quadrature.hpp"
#include "bessel_lab/specfun.hpp"

using namespace bessel_lab;

namespace {

IbpfCase make_case(double d, double a, double ap, FiniteMeasure m, IbpfMode mode = IbpfMode::Bridge) {
  return IbpfCase{"t", BridgeSpec{d, a, ap}, ExpFunctional::single(std::move(m)), TestFunctionC2c::bump(0.2),
                  mode};
}

}  // namespace

TEST(Ibpf, Branch) {
  EXPECT_EQ(ibpf_branch(3.0), "delta3");
  EXPECT_EQ(ibpf_branch(1.0), "delta1");
  EXPECT_EQ(ibpf_branch(2.5), "generic");
  EXPECT_EQ(ibpf_branch(0.5), "generic");
}

TEST(Ibpf, RelativeError) {
  EXPECT_EQ(relative_error(0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(relative_error(1.0, 3.0), 0.5);
}

TEST(Ibpf, SanityRows) {
  for (double d : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5}) {
    const auto rep = verify(make_case(d, 0.0, 0.0, FiniteMeasure::zero()));
    EXPECT_TRUE(rep.pass) << d << " rel " << rep.rel_err;
  }
}

TEST(Ibpf, Delta3MeanClosedForm) {
  const auto c = make_case(3.0, 0.0, 0.0, FiniteMeasure::zero());
  QuadOptions o;
  o.abs_tol = 1e-13;
  auto f = [&](double r) { return c.h.d2(r) * std::sqrt(2 * r * (1 - r)) * 2 / std::sqrt(M_PI); };
  const double want = integrate_breaks(f, {0.2, 0.5, 0.8}, o).value;
  EXPECT_NEAR(lhs_bridge_analytic(c), want, 1e-9);
  // and the right-hand side is -int h gamma(r, 0)
  auto g = [&](double r) { return -c.h.value(r) / std::sqrt(2 * M_PI * std::pow(r * (1 - r), 3)); };
  EXPECT_NEAR(rhs_ibpf(c), integrate_breaks(g, {0.2, 0.5, 0.8}, o).value, 1e-9);
}

TEST(Ibpf, UnifiedAgreesWithBranch) {
  const auto c = make_case(2.5, 1.0, 0.5, FiniteMeasure::dirac(0.6));
  EXPECT_LT(relative_error(rhs_ibpf(c), rhs_ibpf_unified(c)), 1e-7);
  const auto c2 = make_case(1.5, 1.0, 2.0, FiniteMeasure::constant_density(0.5));
  EXPECT_LT(relative_error(rhs_ibpf(c2), rhs_ibpf_unified(c2)), 1e-7);
}

TEST(Ibpf, BatteryCorners) {
  for (double d : {0.5, 2.0, 3.5}) {
    const auto rep = verify(make_case(d, 1.0, 2.0, FiniteMeasure::dirac(0.6)));
    EXPECT_TRUE(rep.pass) << d << " rel " << rep.rel_err;
    const auto rep2 = verify(make_case(d, 1.0, 0.0, FiniteMeasure::constant_density(0.5)));
    EXPECT_TRUE(rep2.pass) << d << " rel " << rep2.rel_err;
  }
}

TEST(Ibpf, UnconstrainedMode) {
  for (double d : {1.5, 2.0, 3.0}) {
    const auto rep = verify(make_case(d, 1.0, 0.0, FiniteMeasure::dirac(0.6), IbpfMode::Unconstrained));
    EXPECT_TRUE(rep.pass) << d << " rel " << rep.rel_err;
  }
}

TEST(Ibpf, UnconstrainedZeroMeasureIsZetaIntegral) {
  const auto c = make_case(2.5, 0.0, 0.0, FiniteMeasure::zero(), IbpfMode::Unconstrained);
  auto f = [&](double r) { return c.h.value(r) * zeta_second_deriv(2.5, 0.0, r, ZetaRoute::FinitePart); };
  QuadOptions o;
  o.abs_tol = 1e-12;
  EXPECT_NEAR(lhs_uncond_analytic(c), integrate_breaks(f, {0.2, 0.5, 0.8}, o).value, 1e-9);
}

TEST(Ibpf, EndpointContinuity) {
  const auto c0 = make_case(1.5, 1.0, 0.0, FiniteMeasure::dirac(0.6));
  const auto c1 = make_case(1.5, 1.0, 1e-7, FiniteMeasure::dirac(0.6));
  EXPECT_LT(relative_error(lhs_bridge_analytic(c0), lhs_bridge_analytic(c1)), 1e-6);
}

TEST(Ibpf, ConditioningIdentity) {
  // bridge right-hand sides integrate against p_1(a, .) to the unconstrained one
  const double d = 2.5, a = 1.0;
  const FiniteMeasure m = FiniteMeasure::dirac(0.6);
  auto f = [&](double ap) { return rhs_ibpf(make_case(d, a, ap, m)) * p_delta_t(d, 1.0, a, ap); };
  QuadOptions o;
  o.abs_tol = 1e-10;
  o.rel_tol = 1e-8;
  const double v = integrate(f, 0.0, 3.0, o).value + integrate_to_infinity(f, 3.0, 1.5, o).value;
  const double u = rhs_ibpf(make_case(d, a, 0.0, m, IbpfMode::Unconstrained));
  EXPECT_LT(relative_error(v, u), 1e-6);
}

TEST(Ibpf, TaylorRemainderDecay) {
  // |T^{2k}_b Sigma| ~ b^{2(k+1)} near 0
  for (double d : {0.5, 1.5, 2.5}) {
    const BridgeSpec spec{d, 1.0, 0.5};
    const int k = spec.k();
    const SigmaContext ctx(d, 1.0, 0.5, FiniteMeasure::dirac(0.6));
    const auto s = ctx.series_in_s(0.4, k + 1);
    auto rem = [&](double b) {
      double v = ctx.sigma(0.4, b);
      for (int j = 0; j <= k; ++j) v -= s.coeffs[j] * std::pow(b, 2 * j);
      return std::abs(v);
    };
    const double b1 = 0.02, b2 = 0.04;
    const double slope = std::log(rem(b2) / rem(b1)) / std::log(b2 / b1);
    EXPECT_GE(slope, 2 * (k + 1) - 0.1) << d;
  }
}

TEST(Gamma3, Values) {
  EXPECT_NEAR(gamma_3(0.5, 0.0), 8 / std::sqrt(2 * M_PI), 1e-14);
  EXPECT_NEAR(gamma_3(0.3, 1e-9), gamma_3(0.3, 0.0), 1e-12);
  for (auto [r, a] : {std::pair{0.3, 1.2}, std::pair{0.6, 0.4}}) {
    const double e = 1e-4;
    EXPECT_NEAR(0.5 * bridge_density(3.0, r, a, a, e) / (e * e), gamma_3(r, a), 1e-5);
  }
}

TEST(Gamma3, RhsRoutesAgree) {
  for (double a : {0.0, 1.0}) {
    const auto c = make_case(3.0, a, a, FiniteMeasure::dirac(0.6));
    EXPECT_LT(relative_error(rhs_delta3_gamma(c), rhs_ibpf(c)), 1e-7);
  }
}

TEST(IbpfMc, ZeroMeasureDelta2) {
  auto c = make_case(2.0, 0.0, 0.0, FiniteMeasure::zero());
  c.mesh_points = 257;
  const auto est = lhs_mc(c, 10000, 7);
  EXPECT_LT(std::abs(est.mean - lhs_analytic(c)), 3.5 * est.std_error);
}

TEST(IbpfMc, Delta1SamplersAgree) {
  auto c = make_case(1.0, 0.0, 0.0, FiniteMeasure::dirac(0.6));
  c.mesh_points = 257;
  const auto g = lhs_mc(c, 10000, 11, 1, McSampler::General);
  const auto m = lhs_mc(c, 10000, 12, 1, McSampler::GaussianModulus);
  EXPECT_LT(std::abs(g.mean - m.mean), 3.5 * std::hypot(g.std_error, m.std_error));
}

TEST(IbpfMc, Deterministic) {
  auto c = make_case(1.5, 1.0, 2.0, FiniteMeasure::dirac(0.6));
  c.mesh_points = 129;
  const auto x = lhs_mc(c, 2000, 3, 1), y = lhs_mc(c, 2000, 3, 2);
  EXPECT_EQ(x.mean, y.mean);
  EXPECT_EQ(x.std_error, y.std_error);
}
