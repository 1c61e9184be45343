#pragma once

#include <string>
#include <vector>

namespace bessel_lab {

class GridMesh {
 public:
  explicit GridMesh(int n);
  int size() const { return n_; }
  double step() const { return 1.0 / (n_ - 1); }
  double operator[](int i) const { return i == n_ - 1 ? 1.0 : i * step(); }
  std::vector<double> points() const;
  // index of the mesh point nearest to t
  int nearest(double t) const;

 private:
  int n_;
};

class Path {
 public:
  Path(GridMesh mesh, std::vector<double> values);
  const GridMesh& mesh() const { return mesh_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double operator[](int i) const { return values_[i]; }
  // linear interpolation
  double at(double t) const;

 private:
  GridMesh mesh_;
  std::vector<double> values_;
};

struct Atom {
  double t;
  double weight;
};

// Polynomial density sum_j coeffs[j] r^j on [lo, hi].
struct DensityPiece {
  double lo;
  double hi;
  std::vector<double> coeffs;
  double operator()(double r) const;
};

class FiniteMeasure {
 public:
  FiniteMeasure() = default;
  FiniteMeasure(std::vector<Atom> atoms, std::vector<DensityPiece> pieces);

  static FiniteMeasure zero() { return {}; }
  static FiniteMeasure dirac(double t, double weight = 1.0);
  static FiniteMeasure constant_density(double c, double lo = 0.0, double hi = 1.0);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<DensityPiece>& pieces() const { return pieces_; }
  bool is_zero() const;
  double density(double r) const;
  double mass() const;
  // sorted interior break points (atoms and piece edges) inside (lo, hi)
  std::vector<double> breakpoints(double lo, double hi) const;
  FiniteMeasure snapped(const GridMesh& mesh) const;
  FiniteMeasure scaled(double c) const;

 private:
  void validate() const;
  std::vector<Atom> atoms_;
  std::vector<DensityPiece> pieces_;
};

// C^2 test function compactly supported in [theta, 1 - theta].
class TestFunctionC2c {
 public:
  enum class Family { Bump, QuinticPlateau };

  // exp(-1/((r - theta)(1 - theta - r))), normalised to h(1/2) = 1
  static TestFunctionC2c bump(double theta);
  // product of quintic smoothstep ramps of width `ramp` at both ends, plateau 1
  static TestFunctionC2c quintic_plateau(double theta, double ramp);

  Family family() const { return family_; }
  double theta() const { return theta_; }
  double ramp() const { return ramp_; }
  double lo() const { return theta_; }
  double hi() const { return 1.0 - theta_; }
  double value(double r) const { return eval(r, 0); }
  double d1(double r) const { return eval(r, 1); }
  double d2(double r) const { return eval(r, 2); }
  // break points where the function is only finitely smooth
  std::vector<double> kinks() const;
  std::string describe() const;

 private:
  TestFunctionC2c(Family f, double theta, double ramp);
  double eval(double r, int order) const;
  Family family_;
  double theta_;
  double ramp_;
  double norm_ = 1.0;
};

struct ExpTerm {
  double coef;
  FiniteMeasure m;
};

// Phi(X) = sum_i c_i exp(-<m_i, X^2>)
struct ExpFunctional {
  std::vector<ExpTerm> terms;
  static ExpFunctional single(FiniteMeasure m, double coef = 1.0) {
    return ExpFunctional{{ExpTerm{coef, std::move(m)}}};
  }
  ExpFunctional snapped(const GridMesh& mesh) const;
};

struct BridgeSpec {
  double delta;
  double a;
  double a_prime;
  double kappa() const { return (delta - 3.0) * (delta - 1.0) / 4.0; }
  int k() const;
};

double pair_m_X2(const FiniteMeasure& m, const Path& X);

struct PairingCheck {
  double value;
  double richardson_estimate;
  bool mesh_too_coarse;
};
// pairing plus a coarse-mesh warning from comparing against the every-other-point mesh
PairingCheck pair_m_X2_checked(const FiniteMeasure& m, const Path& X, double rel_tol);

double eval_phi(const ExpFunctional& phi, const Path& X);
double dir_deriv_phi(const ExpFunctional& phi, const TestFunctionC2c& h, const Path& X);

// trapezoid rule for <g, X> on the path mesh
double pair_fn_path(const std::vector<double>& g_on_mesh, const Path& X);

}  // namespace bessel_lab
