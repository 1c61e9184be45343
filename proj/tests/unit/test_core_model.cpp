#include <gtest/gtest.h>

#include <cmath>

#include "bessel_lab/core_model.hpp"
#include "bessel_lab/errors.hpp"

using namespace bessel_lab;

namespace {

Path constant_path(int n, double c) { return Path(GridMesh(n), std::vector<double>(n, c)); }

}  // namespace

TEST(BridgeSpec, KappaAndK) {
  for (double d : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0}) {
    const BridgeSpec s{d, 0.0, 0.0};
    EXPECT_DOUBLE_EQ(s.kappa(), (d - 3.0) * (d - 1.0) / 4.0);
    EXPECT_LE(s.k(), 1);
    EXPECT_EQ(s.k(), static_cast<int>(std::floor((3.0 - d) / 2.0)));
  }
  EXPECT_EQ(BridgeSpec({1.0, 0, 0}).kappa(), 0.0);
  EXPECT_EQ(BridgeSpec({3.0, 0, 0}).kappa(), 0.0);
  EXPECT_NE(BridgeSpec({2.0, 0, 0}).kappa(), 0.0);
}

TEST(Pairing, ZeroMeasure) {
  const GridMesh mesh(101);
  std::vector<double> v;
  for (double t : mesh.points()) v.push_back(std::sin(3 * t) + 2);
  EXPECT_EQ(pair_m_X2(FiniteMeasure::zero(), Path(mesh, v)), 0.0);
}

TEST(Pairing, UnitAtomOnConstant) {
  EXPECT_DOUBLE_EQ(pair_m_X2(FiniteMeasure::dirac(0.5), constant_path(11, 1.7)), 1.7 * 1.7);
}

TEST(Pairing, LebesgueAgainstIdentity) {
  const GridMesh mesh(1001);
  const Path X(mesh, mesh.points());
  EXPECT_NEAR(pair_m_X2(FiniteMeasure::constant_density(1.0), X), 1.0 / 3.0, 1e-6);
}

TEST(Pairing, AtomIsMeshIndependentToSecondOrder) {
  // X(t) = sin(pi t): interpolation error at a non-mesh atom scales like step^2
  auto err = [](int n) {
    const GridMesh mesh(n);
    std::vector<double> v;
    for (double t : mesh.points()) v.push_back(std::sin(M_PI * t));
    const double exact = std::pow(std::sin(M_PI * 0.3), 2);
    return std::abs(pair_m_X2(FiniteMeasure::dirac(0.3), Path(mesh, v)) - exact);
  };
  const double e1 = err(65), e2 = err(129);
  EXPECT_LT(e2, 0.4 * e1);
}

TEST(Pairing, CoarseMeshWarning) {
  const GridMesh mesh(9);
  std::vector<double> v;
  for (double t : mesh.points()) v.push_back(std::exp(5 * t));
  const auto chk = pair_m_X2_checked(FiniteMeasure::constant_density(1.0), Path(mesh, v), 1e-8);
  EXPECT_TRUE(chk.mesh_too_coarse);
}

TEST(EvalPhi, Examples) {
  const Path one = constant_path(21, 1.0);
  EXPECT_DOUBLE_EQ(eval_phi(ExpFunctional::single(FiniteMeasure::zero()), one), 1.0);
  EXPECT_NEAR(eval_phi(ExpFunctional::single(FiniteMeasure::dirac(0.5)), one), std::exp(-1.0), 1e-15);
  ExpFunctional lin{{{2.0, FiniteMeasure::zero()}, {-1.0, FiniteMeasure::zero()}}};
  EXPECT_DOUBLE_EQ(eval_phi(lin, one), 1.0);
}

TEST(DirDeriv, Examples) {
  const Path one = constant_path(21, 1.0);
  const auto h = TestFunctionC2c::bump(0.2);
  EXPECT_EQ(dir_deriv_phi(ExpFunctional::single(FiniteMeasure::zero()), h, one), 0.0);
  EXPECT_EQ(dir_deriv_phi(ExpFunctional::single(FiniteMeasure::dirac(0.1)), h, one), 0.0);
  const double h_half = h.value(0.5);
  EXPECT_NEAR(dir_deriv_phi(ExpFunctional::single(FiniteMeasure::dirac(0.5)), h, one),
              -2.0 * h_half * std::exp(-1.0), 1e-14);
}

TEST(DirDeriv, Linearity) {
  const GridMesh mesh(129);
  std::vector<double> v;
  for (double t : mesh.points()) v.push_back(1.0 + t * (1 - t));
  const Path X(mesh, v);
  const auto h = TestFunctionC2c::quintic_plateau(0.1, 0.2);
  const ExpFunctional p1 = ExpFunctional::single(FiniteMeasure::dirac(0.5, 0.7));
  const ExpFunctional p2 = ExpFunctional::single(FiniteMeasure::constant_density(0.5), -1.3);
  ExpFunctional both{{p1.terms[0], p2.terms[0]}};
  EXPECT_NEAR(dir_deriv_phi(both, h, X), dir_deriv_phi(p1, h, X) + dir_deriv_phi(p2, h, X), 1e-15);
}

TEST(TestFunction, BumpIsC2WithAnalyticDerivatives) {
  const auto h = TestFunctionC2c::bump(0.2);
  EXPECT_EQ(h.value(0.1), 0.0);
  EXPECT_EQ(h.value(0.9), 0.0);
  EXPECT_GT(h.value(0.5), 0.0);
  for (double r : {0.3, 0.45, 0.6, 0.75}) {
    const double e = 1e-5;
    EXPECT_NEAR(h.d1(r), (h.value(r + e) - h.value(r - e)) / (2 * e), 1e-6 * (1 + std::abs(h.d1(r))));
    EXPECT_NEAR(h.d2(r), (h.d1(r + e) - h.d1(r - e)) / (2 * e), 1e-5 * (1 + std::abs(h.d2(r))));
  }
}

TEST(TestFunction, QuinticDerivatives) {
  const auto h = TestFunctionC2c::quintic_plateau(0.15, 0.2);
  for (double r : {0.2, 0.3, 0.5, 0.7, 0.8}) {
    const double e = 1e-5;
    EXPECT_NEAR(h.d2(r), (h.d1(r + e) - h.d1(r - e)) / (2 * e), 1e-5);
  }
  EXPECT_EQ(h.value(0.1), 0.0);
}

TEST(FiniteMeasure, Validation) {
  EXPECT_THROW(FiniteMeasure::dirac(1.5), DomainError);
  EXPECT_THROW(FiniteMeasure::dirac(0.5, -1.0), DomainError);
  EXPECT_THROW(FiniteMeasure::constant_density(-0.1), DomainError);
  EXPECT_NEAR(FiniteMeasure::constant_density(0.5).mass(), 0.5, 1e-15);
}
