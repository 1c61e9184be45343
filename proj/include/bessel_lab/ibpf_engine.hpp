#pragma once

#include <cstdint>
#include <string>

#include "bessel_lab/core_model.hpp"
#include "bessel_lab/laplace_sigma.hpp"

namespace bessel_lab {

enum class IbpfMode { Bridge, Unconstrained };

struct IbpfCase {
  std::string id;
  BridgeSpec spec;  // a_prime unused in unconstrained mode
  ExpFunctional phi;
  TestFunctionC2c h;
  IbpfMode mode = IbpfMode::Bridge;
  double tol = 1e-5;
  long mc_paths = 0;  // 0 disables the Monte Carlo route
  int mesh_points = 513;
  ZetaRoute zeta_route = ZetaRoute::FinitePart;
};

struct VerifyReport {
  std::string case_id;
  std::string branch;
  double lhs_analytic = 0.0;
  double rhs = 0.0;
  double rhs_unified = 0.0;  // NaN when the unified evaluator is disabled
  double abs_err = 0.0;
  double rel_err = 0.0;
  double unified_rel_err = 0.0;
  bool pass_analytic = false;
  bool mc_run = false;
  double lhs_mc = 0.0;
  double mc_stderr = 0.0;
  // RHS of the same case on the snapped atoms used by the Monte Carlo mesh
  double rhs_mc_case = 0.0;
  bool pass_mc = true;
  bool pass = false;
  double seconds = 0.0;
};

double relative_error(double x, double y);

// Which right-hand side formula applies: "generic", "delta3" or "delta1".
std::string ibpf_branch(double delta);

double lhs_uncond_analytic(const IbpfCase& c);
// Integrates (h'' - 2 h m) against r -> E[X_r Phi] with E[X_r Phi] = int b^delta Sigma db.
double lhs_bridge_analytic(const IbpfCase& c);
double lhs_analytic(const IbpfCase& c);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  // -kappa E[<h, X^{-3}> Phi] on the same paths
  double drift_mean = 0.0;
  double drift_std_error = 0.0;
};
enum class McSampler { General, GaussianModulus };
McEstimate lhs_mc(const IbpfCase& c, long n, std::uint64_t seed, int jobs = 1,
                  McSampler sampler = McSampler::General);

// Branch evaluator: Taylor-subtracted b-integral through the s = b^2 finite part.
double rhs_ibpf(const IbpfCase& c);
// -Gamma(delta)/(4(delta-2)) int h <mu_{delta-3}, Sigma(.|b)> dr, in the b variable.
double rhs_ibpf_unified(const IbpfCase& c);
// delta = 3, a = a': -int h gamma(r, a) E[Phi | X_r = 0] dr
double rhs_delta3_gamma(const IbpfCase& c);

double gamma_3(double r, double a);

VerifyReport verify(const IbpfCase& c, std::uint64_t seed = 0, int jobs = 1);

}  // namespace bessel_lab
