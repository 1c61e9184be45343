#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bessel_lab/core_model.hpp"
#include "bessel_lab/rng.hpp"

namespace bessel_lab {

// d independent Brownian bridges 0 -> 0 on the mesh.
std::vector<Path> gaussian_bridge(int d, const GridMesh& mesh, RngStream& rng);

// |beta| for a delta-dimensional Brownian bridge from (a, 0, ..) to 0; delta in {1, 2, 3}.
Path bessel_bridge_integer(int delta, const GridMesh& mesh, RngStream& rng, double a = 0.0);

// One draw from q^delta_t(x, .).
double besq_transition_sample(double delta, double t, double x, RngStream& rng);

// Bessel process started at a on the mesh (no conditioning at 1).
Path bessel_path(double delta, double a, const GridMesh& mesh, RngStream& rng);

// Bessel bridge a -> a_prime on a fixed mesh.  Each step draws the squared process
// from q_dt(x, z) q_tau(z, a'^2) (normalised in z): exactly by a Poisson-Gamma mixture
// when a_prime = 0, otherwise by rejection from q_dt(x, .) against the per-step maximum
// of z -> q_tau(z, a'^2) / a'^{2 nu}.
class BridgeSampler {
 public:
  BridgeSampler(double delta, double a, double a_prime, GridMesh mesh);
  Path sample(RngStream& rng) const;
  const GridMesh& mesh() const { return mesh_; }
  // log of the rejection bound at step i (unused when a_prime = 0)
  double log_sup(int step) const { return log_sup_[step]; }

 private:
  double delta_, a_, ap_;
  GridMesh mesh_;
  std::vector<double> log_sup_;
};

Path bessel_bridge_general(double delta, double a, double a_prime, const GridMesh& mesh,
                           RngStream& rng);

struct McResult {
  double mean = 0.0;
  double std_error = 0.0;
  long n = 0;
};

// Mean of integrand(sampler(rng)) over n paths.  Paths are drawn in fixed blocks, block b
// from RngStream(seed, b), and block statistics are merged in block order, so the result
// does not depend on `jobs`.
McResult mc_estimate(const std::function<double(const Path&)>& integrand,
                     const std::function<Path(RngStream&)>& sampler, long n, std::uint64_t seed,
                     int jobs = 1);

// Same for several integrands evaluated on the same paths.
std::vector<McResult> mc_estimate_multi(
    const std::function<void(const Path&, std::vector<double>&)>& integrands, int count,
    const std::function<Path(RngStream&)>& sampler, long n, std::uint64_t seed, int jobs = 1);

// BESSEL_LAB_JOBS or 1
int default_jobs();

}  // namespace bessel_lab
