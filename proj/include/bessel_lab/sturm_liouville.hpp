#pragma once

#include <vector>

#include "bessel_lab/core_model.hpp"

namespace bessel_lab {

struct SLOptions {
  // longest step of a Taylor-series segment (polynomial densities)
  double max_step = 1.0 / 32.0;
  // integrate zero and constant densities by series too (used as an oracle)
  bool force_series = false;
};

// phi'' = 2 phi m on [0,1], phi(0) = 1, phi'(1+) = 0; rho_r = int_0^r phi^{-2}.
// Each segment carries its fundamental pair (U, V) so that on [s, e]
//   phi(s + v) = phi_s U(v) + dphi_s V(v),  rho(s + v) = rho_s + V(v) / (phi_s phi(s + v)).
class SLSolution {
 public:
  enum class Kind { Linear, Hyperbolic, Series };
  struct Segment {
    double s, e;
    Kind kind;
    double theta = 0.0;           // Hyperbolic: U = cosh(theta v)
    std::vector<double> u, v;     // Series: Taylor coefficients of U and V in v
    double phi_s, dphi_s, rho_s;  // state just right of s
  };

  double phi(double r) const;
  // right derivative (left derivative at r = 1)
  double dphi(double r) const;
  double rho(double r) const;
  double phi1() const { return phi1_; }
  double rho1() const { return rho1_; }
  double dphi0() const { return dphi0_right_; }
  // includes the jump of an atom at 0
  double dphi0_left() const { return dphi0_left_; }
  bool closed_form() const { return closed_form_; }
  const std::vector<Segment>& segments() const { return segs_; }
  // worst mismatch between the stored states and a forward re-integration from r = 0,
  // together with |phi'(1+)|
  double residual() const;

 private:
  friend SLSolution solve_sl(const FiniteMeasure&, double, const SLOptions&);
  const Segment& locate(double r) const;
  void eval(const Segment& sg, double v, double& U, double& V, double& dU, double& dV) const;

  std::vector<Segment> segs_;
  std::vector<Atom> atoms_;
  double phi1_ = 1.0, rho1_ = 1.0, dphi0_right_ = 0.0, dphi0_left_ = 0.0;
  bool closed_form_ = true;
};

SLSolution solve_sl(const FiniteMeasure& m, double tol = 1e-12, const SLOptions& opts = {});

double rho_of(const SLSolution& sol, double r);

}  // namespace bessel_lab
