#include "bessel_lab/spde_sim.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "bessel_lab/errors.hpp"
#include "bessel_lab/quadrature.hpp"
#include "bessel_lab/specfun.hpp"
#include "bessel_lab/stats.hpp"

namespace bessel_lab {
namespace {

// int_{-1}^{1} exp(-1 / (1 - y^2)) dy
constexpr double kProfileMass = 0.44399381616807943;

double e_k(int k, double x) { return M_SQRT2 * std::sin(k * M_PI * x); }

void check_K(int K) {
  if (K < 1) throw DomainError("mode count must be positive");
}

void check_field(const SpectralField& f) {
  check_K(f.K);
  for (const auto& c : f.coeffs) {
    if (static_cast<int>(c.size()) != f.K) throw DomainError("field coefficient count does not match K");
  }
}

}  // namespace

SpectralField stationary_field(int K, RngStream& rng) {
  check_K(K);
  SpectralField f;
  f.K = K;
  for (auto& c : f.coeffs) {
    c.resize(K);
    for (int k = 1; k <= K; ++k) c[k - 1] = rng.normal() / std::sqrt(mode_eigenvalue(k));
  }
  return f;
}

CovarianceValue covariance_q_tail(double t, double x, double xp, int K);

static CovarianceValue direct_q(double t, double x, double xp, int K) {
  CovarianceValue out;
  for (int k = 1; k <= K; ++k) {
    const double lam = mode_eigenvalue(k);
    out.value += -std::expm1(-lam * t) / lam * e_k(k, x) * e_k(k, xp);
  }
  // sum_{k > K} 2 / (k pi)^2 <= 2 / (pi^2 K)
  out.truncation_bound = 2.0 / (M_PI * M_PI * K);
  return out;
}

CovarianceValue covariance_q(double t, double x, double xp, int K) {
  check_K(K);
  if (!(t >= 0.0)) throw DomainError("time must be >= 0");
  if (!(x >= 0.0 && x <= 1.0 && xp >= 0.0 && xp <= 1.0)) throw DomainError("points must lie in [0, 1]");
  const double closed = std::min(x, xp) - x * xp;
  if (std::isinf(t)) return {closed, 0.0};
  // once the tail modes have relaxed, q_inf - q^t converges much faster than the direct sum
  if (mode_eigenvalue(K + 1) * t >= 30.0) {
    const CovarianceValue tail = covariance_q_tail(t, x, xp, K);
    return {closed - tail.value, tail.truncation_bound};
  }
  return direct_q(t, x, xp, K);
}

CovarianceValue covariance_q_tail(double t, double x, double xp, int K) {
  check_K(K);
  if (!(t >= 0.0)) throw DomainError("time must be >= 0");
  if (!(x >= 0.0 && x <= 1.0 && xp >= 0.0 && xp <= 1.0)) throw DomainError("points must lie in [0, 1]");
  CovarianceValue out;
  if (std::isinf(t)) return out;
  // for small t the dropped modes have barely moved, so q_inf - q_t is the better sum
  if (mode_eigenvalue(K + 1) * t < M_LN2) {
    const CovarianceValue q = direct_q(t, x, xp, K);
    return {std::min(x, xp) - x * xp - q.value, q.truncation_bound};
  }
  for (int k = 1; k <= K; ++k) {
    const double lam = mode_eigenvalue(k);
    out.value += std::exp(-lam * t) / lam * e_k(k, x) * e_k(k, xp);
  }
  out.truncation_bound = 2.0 * std::exp(-mode_eigenvalue(K + 1) * t) / (M_PI * M_PI * K);
  return out;
}

OuStepper::OuStepper(int K, double dt) : K_(K), dt_(dt), decay_(K), sd_(K) {
  check_K(K);
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  for (int k = 1; k <= K; ++k) {
    const double lam = mode_eigenvalue(k);
    decay_[k - 1] = std::exp(-0.5 * lam * dt);
    sd_[k - 1] = std::isinf(dt) ? 1.0 / std::sqrt(lam) : std::sqrt(-std::expm1(-lam * dt) / lam);
  }
}

void OuStepper::step(SpectralField& field, RngStream& rng) const {
  if (field.K != K_) throw DomainError("field and stepper disagree on K");
  for (auto& c : field.coeffs) {
    for (int k = 0; k < K_; ++k) c[k] = decay_[k] * c[k] + sd_[k] * rng.normal();
  }
  field.time += dt_;
}

SpectralField ou_step(SpectralField field, double dt, RngStream& rng) {
  check_field(field);
  OuStepper(field.K, dt).step(field, rng);
  return field;
}

FieldSynth::FieldSynth(int K, const GridMesh& mesh) : K_(K), mesh_(mesh) {
  check_K(K);
  const int n = mesh_.size();
  table_.resize(static_cast<std::size_t>(n) * K);
  for (int i = 0; i < n; ++i) {
    for (int k = 1; k <= K; ++k) {
      // endpoints exactly zero
      table_[static_cast<std::size_t>(i) * K + k - 1] = (i == 0 || i == n - 1) ? 0.0 : e_k(k, mesh_[i]);
    }
  }
}

std::vector<double> FieldSynth::component(const SpectralField& field, int c) const {
  if (field.K != K_) throw DomainError("field and synthesis table disagree on K");
  const int n = mesh_.size();
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> S(
      table_.data(), n, K_);
  Eigen::Map<const Eigen::VectorXd> v(field.coeffs[c].data(), K_);
  std::vector<double> out(n);
  Eigen::Map<Eigen::VectorXd>(out.data(), n) = S * v;
  return out;
}

std::vector<double> FieldSynth::norm(const SpectralField& field) const {
  std::vector<double> a = component(field, 0);
  const std::vector<double> b = component(field, 1);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::hypot(a[i], b[i]);
  return a;
}

Path field_to_u(const SpectralField& field, const GridMesh& mesh) {
  check_field(field);
  return Path(mesh, FieldSynth(field.K, mesh).norm(field));
}

Mollifier::Mollifier(double eta) : eta_(eta) {
  if (!(eta > 0.0)) throw DomainError("mollifier width must be positive");
}

double Mollifier::profile(double y) {
  const double a = std::abs(y);
  if (a >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - a * a));
}

double Mollifier::normaliser() { return 1.0 / kProfileMass; }

double Mollifier::operator()(double x) const { return normaliser() * profile(x / eta_) / eta_; }

double f_eps_eta(double x, double eps, double eta) {
  if (!(eta > 0.0 && eps > 0.0)) throw DomainError("eps and eta must be positive");
  if (!(eta < eps)) throw DomainError("need eta < eps");
  if (!(x >= 0.0)) throw DomainError("f_eps_eta needs x >= 0");
  if (x == 0.0) return 0.0;
  double v = 0.0;
  if (x >= eps) v += 1.0 / (x * x * x);
  if (x < eta) v -= (2.0 / eps) * Mollifier(eta)(x) / x;
  return 0.25 * v;
}

DecompositionSeries run_decomposition(const TestFunctionC2c& h, const DecompositionConfig& cfg,
                                      RngStream& rng) {
  check_K(cfg.K);
  if (!(cfg.dt > 0.0 && cfg.T > 0.0)) throw DomainError("dt and T must be positive");
  if (!(cfg.eta > 0.0 && cfg.eta < cfg.eps)) throw DomainError("need 0 < eta < eps");
  for (double e : cfg.extra_eta) {
    if (!(e > 0.0 && e < cfg.eps)) throw DomainError("need 0 < eta < eps");
  }
  if (cfg.mesh_points < 3) throw DomainError("synthesis mesh needs at least 3 points");
  if (cfg.record_every < 1) throw DomainError("record_every must be positive");

  const GridMesh mesh(cfg.mesh_points);
  const int n = mesh.size();
  const double dx = mesh.step();
  // restrict the synthesis to supp(h), plus the middle point
  std::vector<int> idx;
  std::vector<double> wh, wh2;
  const int mid = n / 2;
  int mid_pos = -1;
  for (int i = 1; i + 1 < n; ++i) {
    const double x = mesh[i];
    const double hv = h.value(x), h2 = h.d2(x);
    if (hv != 0.0 || h2 != 0.0 || i == mid) {
      if (i == mid) mid_pos = static_cast<int>(idx.size());
      idx.push_back(i);
      wh.push_back(hv * dx);
      wh2.push_back(h2 * dx);
    }
  }
  const int m = static_cast<int>(idx.size());
  Eigen::MatrixXd S(m, cfg.K);
  for (int j = 0; j < m; ++j) {
    for (int k = 1; k <= cfg.K; ++k) S(j, k - 1) = e_k(k, mesh[idx[j]]);
  }

  SpectralField field = stationary_field(cfg.K, rng);
  const OuStepper stepper(cfg.K, cfg.dt);
  const long steps = std::lround(cfg.T / cfg.dt);
  if (steps < 1) throw DomainError("T must be at least one time step");

  std::vector<Mollifier> mols;
  std::vector<double> etas{cfg.eta};
  etas.insert(etas.end(), cfg.extra_eta.begin(), cfg.extra_eta.end());
  for (double e : etas) mols.emplace_back(e);
  const double inv_eps = 1.0 / cfg.eps;

  Eigen::VectorXd u(m);
  auto synth = [&]() {
    Eigen::Map<const Eigen::VectorXd> c0(field.coeffs[0].data(), cfg.K);
    Eigen::Map<const Eigen::VectorXd> c1(field.coeffs[1].data(), cfg.K);
    const Eigen::VectorXd a = S * c0, b = S * c1;
    for (int j = 0; j < m; ++j) u[j] = std::hypot(a[j], b[j]);
  };

  DecompositionSeries out;
  out.n_extra.assign(cfg.extra_eta.size(), {});
  std::vector<double> nacc(etas.size(), 0.0);
  double drift = 0.0, uh0 = 0.0;
  auto record = [&](double t, double uh) {
    out.t.push_back(t);
    out.uh.push_back(uh);
    out.n.push_back(nacc[0]);
    for (std::size_t e = 1; e < etas.size(); ++e) out.n_extra[e - 1].push_back(nacc[e]);
    out.m.push_back(uh - uh0 - drift + nacc[0]);
  };

  synth();
  if (mid_pos >= 0) out.u_mid_start.push_back(u[mid_pos]);
  for (long s = 0;; ++s) {
    double uh = 0.0, uh2 = 0.0;
    for (int j = 0; j < m; ++j) {
      uh += wh[j] * u[j];
      uh2 += wh2[j] * u[j];
    }
    if (!std::isfinite(uh) || !std::isfinite(uh2)) throw SimulationError("non-finite field value");
    if (s == 0) uh0 = uh;
    if (s % cfg.record_every == 0 || s == steps) record(s * cfg.dt, uh);
    if (s == steps) break;
    // left-point sums over [s dt, (s + 1) dt)
    drift += 0.5 * cfg.dt * uh2;
    for (std::size_t e = 0; e < etas.size(); ++e) {
      double fh = 0.0;
      for (int j = 0; j < m; ++j) {
        const double x = u[j];
        if (wh[j] == 0.0 || x == 0.0) continue;
        double f = 0.0;
        if (x >= cfg.eps) f += 1.0 / (x * x * x);
        if (x < etas[e]) f -= 2.0 * inv_eps * mols[e](x) / x;
        fh += 0.25 * f * wh[j];
      }
      nacc[e] += 0.5 * cfg.dt * fh;
    }
    stepper.step(field, rng);
    synth();
  }
  if (mid_pos >= 0) out.u_mid_end.push_back(u[mid_pos]);
  return out;
}

GammaRs gamma_rs(double r, double s, double t, double theta, int K) {
  if (!(theta > 0.0 && theta < 0.5)) throw DomainError("theta must lie in (0, 1/2)");
  if (!(r >= theta && r <= 1.0 - theta && s >= theta && s <= 1.0 - theta)) {
    throw DomainError("r and s must lie in [theta, 1 - theta]");
  }
  const auto inf = std::numeric_limits<double>::infinity();
  const CovarianceValue qr = covariance_q(inf, r, r, K), qs = covariance_q(inf, s, s, K);
  const CovarianceValue qt = covariance_q_tail(t, r, s, K);
  GammaRs g;
  g.m[0][0] = qr.value;
  g.m[1][1] = qs.value;
  g.m[0][1] = g.m[1][0] = qt.value;
  g.det = qr.value * qs.value - qt.value * qt.value;
  g.bound = theta * theta * std::abs(r - s);
  const double e = std::max(qr.truncation_bound, qt.truncation_bound);
  g.slack = e * (qr.value + qs.value + 2.0 * std::abs(qt.value)) + 2.0 * e * e;
  g.holds = g.det >= g.bound - g.slack;
  return g;
}

SpdeDiagnostics spde_diagnostics(const TestFunctionC2c& h, const DecompositionConfig& cfg,
                                 int replicas, std::uint64_t seed, int jobs, int increment_blocks) {
  if (replicas < 2) throw DomainError("need at least two replicas");
  const long steps = std::lround(cfg.T / cfg.dt);
  if (increment_blocks < 2 || steps % increment_blocks != 0 ||
      (steps / increment_blocks) % cfg.record_every != 0) {
    throw DomainError("increment blocks must align with the recorded time grid");
  }
  SpdeDiagnostics d;
  d.replicas = replicas;
  d.series.resize(replicas);
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errs(replicas);
  auto work = [&]() {
    for (int i; (i = next.fetch_add(1)) < replicas;) {
      try {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        d.series[i] = run_decomposition(h, cfg, rng);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  jobs = std::max(1, std::min(jobs, replicas));
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errs) {
    if (e) std::rethrow_exception(e);
  }

  QuadOptions qo;
  qo.rel_tol = 1e-12;
  d.h_l2_sq = integrate([&](double x) { return h.value(x) * h.value(x); }, h.lo(), h.hi(), qo).value;

  std::vector<double> ratio(replicas), start(replicas), end(replicas);
  for (int i = 0; i < replicas; ++i) {
    const auto& s = d.series[i];
    ratio[i] = s.m.back() * s.m.back() / (d.h_l2_sq * cfg.T);
    start[i] = s.uh.front();
    end[i] = s.uh.back();
  }
  const MeanStderr ms = mean_stderr(ratio);
  d.bracket_ratio = ms.mean;
  d.bracket_ratio_stderr = ms.std_error;
  d.ks_stationarity_p = ks_two_sample(start, end).p_value;

  const long stride = steps / increment_blocks / cfg.record_every;
  std::vector<double> y, x1, x2;
  for (const auto& s : d.series) {
    for (int j = 1; j < increment_blocks; ++j) {
      const long a = j * stride, b = (j + 1) * stride;
      y.push_back(s.m[b] - s.m[a]);
      x1.push_back(s.uh[a]);
      x2.push_back(s.n[a]);
    }
  }
  const Regression reg = ols({x1, x2}, y);
  d.reg_coef = reg.coef;
  d.reg_stderr = reg.std_error;
  return d;
}

double stationary_marginal_ks(double r, int K, int samples, std::uint64_t seed) {
  check_K(K);
  if (!(r > 0.0 && r < 1.0)) throw DomainError("r must lie in (0, 1)");
  if (samples < 1) throw DomainError("need at least one sample");
  std::vector<double> ek(K);
  for (int k = 1; k <= K; ++k) ek[k - 1] = e_k(k, r);
  std::vector<double> u(samples);
  for (int i = 0; i < samples; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    const SpectralField f = stationary_field(K, rng);
    double a = 0.0, b = 0.0;
    for (int k = 0; k < K; ++k) {
      a += f.coeffs[0][k] * ek[k];
      b += f.coeffs[1][k] * ek[k];
    }
    u[i] = std::hypot(a, b);
  }
  return ks_one_sample_density(u, [r](double b) { return bridge_density(2.0, r, 0.0, 0.0, b); }).p_value;
}

}  // namespace bessel_lab
