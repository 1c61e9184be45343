#include "bessel_lab/samplers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include "bessel_lab/errors.hpp"
#include "bessel_lab/quadrature.hpp"
#include "bessel_lab/specfun.hpp"

namespace bessel_lab {
namespace {

constexpr long kBlock = 1024;
constexpr int kMaxRejections = 100000;
constexpr double kMinAcceptance = 0.01;
constexpr int kInverseCells = 512;

double gamma_draw(double shape, double scale, RngStream& rng) {
  std::gamma_distribution<double> g(shape, scale);
  return g(rng);
}

long poisson_draw(double mean, RngStream& rng) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<long> p(mean);
  return p(rng);
}

// one step of a Brownian bridge to 0 at time 1
double bridge_step(double x, double t0, double t1, RngStream& rng) {
  if (t1 >= 1.0) return 0.0;
  const double f = (1.0 - t1) / (1.0 - t0);
  return x * f + std::sqrt((t1 - t0) * f) * rng.normal();
}

double golden_max(const std::function<double(double)>& g, double lo, double hi, double* arg) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double g1 = g(x1), g2 = g(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
    if (g1 < g2) {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + gr * (hi - lo);
      g2 = g(x2);
    } else {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - gr * (hi - lo);
      g1 = g(x1);
    }
  }
  const double g0 = g(0.0);
  double best = g1 >= g2 ? g1 : g2, at = g1 >= g2 ? x1 : x2;
  if (g0 > best) {
    best = g0;
    at = 0.0;
  }
  if (arg) *arg = at;
  return best;
}

// Inverse-CDF draw from z -> q_dt(x, z) q_tau(z, y). In u = z^p / p (p = delta/2) the
// density is bounded, so the table is built there.
double bridge_step_inverse(double delta, double dt, double tau, double x, double y,
                           RngStream& rng) {
  const double p = 0.5 * delta;
  auto logg = [&](double z) {
    return log_q_delta_t_reg(delta, dt, x, z) + log_q_delta_t_reg(delta, tau, z, y);
  };
  double zm = 0.0;
  const double top = golden_max(logg, 0.0, 4.0 * std::max(x, y) + 50.0 * (dt + tau), &zm);
  const double s = dt * tau / (dt + tau);
  const double w = 2.0 * std::sqrt(zm * s) + s;
  const double zlo = std::max(0.0, zm - 200.0 * w), zhi = zm + 200.0 * w;
  auto z_of = [&](double u) { return std::pow(p * u, 1.0 / p); };
  auto g = [&](double u) { return std::exp(logg(z_of(u)) - top); };
  const double ulo = std::pow(zlo, p) / p, uhi = std::pow(zhi, p) / p;
  const double du = (uhi - ulo) / kInverseCells;
  std::vector<double> cum(kInverseCells + 1, 0.0);
  for (int k = 0; k < kInverseCells; ++k) {
    cum[k + 1] = cum[k] + gauss_legendre(g, ulo + k * du, ulo + (k + 1) * du, 16);
  }
  const double target = rng.uniform() * cum.back();
  const int k = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), target) - cum.begin()) - 1;
  const int cell = std::clamp(k, 0, kInverseCells - 1);
  double a = ulo + cell * du, b = a + du;
  const double a0 = a, rem = target - cum[cell];
  for (int it = 0; it < 60; ++it) {
    const double m = 0.5 * (a + b);
    if (gauss_legendre(g, a0, m, 16) < rem) {
      a = m;
    } else {
      b = m;
    }
  }
  return z_of(0.5 * (a + b));
}

}  // namespace

std::vector<Path> gaussian_bridge(int d, const GridMesh& mesh, RngStream& rng) {
  if (d < 1 || d > 3) throw DomainError("Gaussian bridge dimension must be 1, 2 or 3");
  std::vector<Path> out;
  for (int c = 0; c < d; ++c) {
    std::vector<double> v(mesh.size(), 0.0);
    for (int i = 0; i + 1 < mesh.size(); ++i) v[i + 1] = bridge_step(v[i], mesh[i], mesh[i + 1], rng);
    out.emplace_back(mesh, std::move(v));
  }
  return out;
}

Path bessel_bridge_integer(int delta, const GridMesh& mesh, RngStream& rng, double a) {
  if (delta < 1 || delta > 3) throw DomainError("integer Bessel bridge needs delta in {1, 2, 3}");
  if (!(a >= 0.0)) throw DomainError("starting point must be >= 0");
  const int n = mesh.size();
  std::vector<double> sq(n, 0.0);
  for (int c = 0; c < delta; ++c) {
    double x = c == 0 ? a : 0.0;
    sq[0] += x * x;
    for (int i = 0; i + 1 < n; ++i) {
      x = bridge_step(x, mesh[i], mesh[i + 1], rng);
      sq[i + 1] += x * x;
    }
  }
  for (auto& v : sq) v = std::sqrt(v);
  return Path(mesh, std::move(sq));
}

double besq_transition_sample(double delta, double t, double x, RngStream& rng) {
  if (!(delta > 0.0)) throw DomainError("dimension must be positive");
  if (!(t > 0.0)) throw DomainError("time must be positive");
  if (!(x >= 0.0)) throw DomainError("state must be >= 0");
  const long j = poisson_draw(x / (2.0 * t), rng);
  return gamma_draw(0.5 * delta + static_cast<double>(j), 2.0 * t, rng);
}

Path bessel_path(double delta, double a, const GridMesh& mesh, RngStream& rng) {
  std::vector<double> v(mesh.size());
  double z = a * a;
  v[0] = a;
  for (int i = 0; i + 1 < mesh.size(); ++i) {
    z = besq_transition_sample(delta, mesh[i + 1] - mesh[i], z, rng);
    v[i + 1] = std::sqrt(z);
  }
  return Path(mesh, std::move(v));
}

BridgeSampler::BridgeSampler(double delta, double a, double a_prime, GridMesh mesh)
    : delta_(delta), a_(a), ap_(a_prime), mesh_(std::move(mesh)) {
  if (!(delta > 0.0)) throw DomainError("dimension must be positive");
  if (!(a >= 0.0 && a_prime >= 0.0)) throw DomainError("bridge end points must be >= 0");
  if (mesh_.size() > 2049) throw DomainError("bridge mesh is limited to 2049 points");
  const int n = mesh_.size();
  log_sup_.assign(n, 0.0);
  if (ap_ == 0.0) return;
  const double y = ap_ * ap_;
  // z -> log q_reg_tau(z, y) is concave; golden-section search for its maximum
  for (int i = 0; i + 2 < n; ++i) {
    const double tau = 1.0 - mesh_[i + 1];
    auto g = [&](double z) { return log_q_delta_t_reg(delta_, tau, z, y); };
    log_sup_[i] = golden_max(g, 0.0, 4.0 * y + 50.0 * tau, nullptr) + 1e-10;
  }
}

Path BridgeSampler::sample(RngStream& rng) const {
  const int n = mesh_.size();
  std::vector<double> v(n);
  v[0] = a_;
  v[n - 1] = ap_;
  double x = a_ * a_;
  const double y = ap_ * ap_;
  const double nu1 = 0.5 * delta_;
  for (int i = 0; i + 2 < n; ++i) {
    const double dt = mesh_[i + 1] - mesh_[i];
    const double tau = 1.0 - mesh_[i + 1];
    double z;
    if (ap_ == 0.0) {
      const double R = 0.5 / dt + 0.5 / tau;
      const long j = poisson_draw(x / (4.0 * dt * dt * R), rng);
      z = gamma_draw(nu1 + static_cast<double>(j), 1.0 / R, rng);
    } else if (log_q_delta_t_reg(delta_, dt + tau, x, y) - log_sup_[i] < std::log(kMinAcceptance)) {
      // the rejection step would mostly fail from this state
      z = bridge_step_inverse(delta_, dt, tau, x, y, rng);
    } else {
      int tries = 0;
      for (;;) {
        z = besq_transition_sample(delta_, dt, x, rng);
        const double lg = log_q_delta_t_reg(delta_, tau, z, y) - log_sup_[i];
        if (std::log(rng.uniform()) < lg) break;
        if (++tries > kMaxRejections) throw SamplerError("bridge rejection step did not accept");
      }
    }
    x = z;
    v[i + 1] = std::sqrt(z);
  }
  return Path(mesh_, std::move(v));
}

Path bessel_bridge_general(double delta, double a, double a_prime, const GridMesh& mesh,
                           RngStream& rng) {
  return BridgeSampler(delta, a, a_prime, mesh).sample(rng);
}

int default_jobs() {
  if (const char* env = std::getenv("BESSEL_LAB_JOBS")) {
    const int j = std::atoi(env);
    if (j > 0) return j;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::vector<McResult> mc_estimate_multi(
    const std::function<void(const Path&, std::vector<double>&)>& integrands, int count,
    const std::function<Path(RngStream&)>& sampler, long n, std::uint64_t seed, int jobs) {
  if (n < 1) throw DomainError("Monte Carlo sample size must be positive");
  const long nblocks = (n + kBlock - 1) / kBlock;
  // per block: count means and count M2 values
  std::vector<std::vector<double>> mean(nblocks, std::vector<double>(count, 0.0));
  std::vector<std::vector<double>> m2(nblocks, std::vector<double>(count, 0.0));
  std::vector<long> size(nblocks, 0);
  std::atomic<long> next{0};
  auto work = [&]() {
    std::vector<double> vals(count);
    for (long b; (b = next.fetch_add(1)) < nblocks;) {
      RngStream rng(seed, static_cast<std::uint64_t>(b));
      const long m = std::min(kBlock, n - b * kBlock);
      for (long k = 0; k < m; ++k) {
        const Path p = sampler(rng);
        integrands(p, vals);
        for (int c = 0; c < count; ++c) {
          const double d = vals[c] - mean[b][c];
          mean[b][c] += d / (k + 1);
          m2[b][c] += d * (vals[c] - mean[b][c]);
        }
      }
      size[b] = m;
    }
  };
  jobs = std::max(1, jobs);
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  std::vector<McResult> out(count);
  for (int c = 0; c < count; ++c) {
    double mu = 0.0, M2 = 0.0;
    long cnt = 0;
    for (long b = 0; b < nblocks; ++b) {
      const long nb = size[b];
      const double d = mean[b][c] - mu;
      const long tot = cnt + nb;
      mu += d * nb / tot;
      M2 += m2[b][c] + d * d * static_cast<double>(cnt) * nb / tot;
      cnt = tot;
    }
    out[c].mean = mu;
    out[c].n = cnt;
    out[c].std_error = cnt > 1 ? std::sqrt(M2 / (cnt - 1) / cnt) : 0.0;
  }
  return out;
}

McResult mc_estimate(const std::function<double(const Path&)>& integrand,
                     const std::function<Path(RngStream&)>& sampler, long n, std::uint64_t seed,
                     int jobs) {
  return mc_estimate_multi([&](const Path& p, std::vector<double>& v) { v[0] = integrand(p); }, 1,
                           sampler, n, seed, jobs)[0];
}

}  // namespace bessel_lab
