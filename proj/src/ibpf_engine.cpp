#include "bessel_lab/ibpf_engine.hpp"

#include <chrono>
#include <cmath>
#include <algorithm>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

#include "bessel_lab/errors.hpp"
#include "bessel_lab/quadrature.hpp"
#include "bessel_lab/samplers.hpp"
#include "bessel_lab/specfun.hpp"

namespace bessel_lab {
namespace {

constexpr double kBranchEps = 1e-12;
constexpr double kUnifiedGuard = 1e-6;

std::optional<double> end_point(const IbpfCase& c) {
  if (c.mode == IbpfMode::Bridge) return c.spec.a_prime;
  return std::nullopt;
}

void check_case(const IbpfCase& c) {
  if (!(c.spec.delta > 0.0)) throw DomainError("dimension must be positive");
  if (!(c.spec.a >= 0.0) || (c.mode == IbpfMode::Bridge && !(c.spec.a_prime >= 0.0))) {
    throw DomainError("boundary values must be >= 0");
  }
  if (c.phi.terms.empty()) throw DomainError("functional has no terms");
  if (!(c.tol > 0.0)) throw DomainError("tolerance must be positive");
}

// int_supp(h) f(r) dr with break points at kinks of h and at the structure of every m_i
double integrate_r(const std::function<double(double)>& f, const IbpfCase& c) {
  const double lo = c.h.lo(), hi = c.h.hi();
  std::vector<double> br{lo};
  for (double k : c.h.kinks()) {
    if (k > lo && k < hi) br.push_back(k);
  }
  for (const auto& t : c.phi.terms) {
    for (double b : t.m.breakpoints(lo, hi)) br.push_back(b);
  }
  br.push_back(hi);
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  QuadOptions opts;
  opts.rel_tol = 1e-11;
  opts.abs_tol = 1e-14;
  const QuadResult q = integrate_breaks(f, br, opts);
  if (!std::isfinite(q.value) ||
      (!q.converged && q.abs_error > 1e3 * std::max(opts.abs_tol, opts.rel_tol * std::abs(q.value)))) {
    std::ostringstream os;
    os << "r-integral did not converge for case '" << c.id << "' (error " << q.abs_error << ")";
    throw ConvergenceError(os.str());
  }
  return q.value;
}

}  // namespace

double relative_error(double x, double y) {
  return std::abs(x - y) / (std::abs(x) + std::abs(y) + 1e-300);
}

std::string ibpf_branch(double delta) {
  if (std::abs(delta - 3.0) < kBranchEps) return "delta3";
  if (std::abs(delta - 1.0) < kBranchEps) return "delta1";
  return "generic";
}

double lhs_uncond_analytic(const IbpfCase& c) {
  check_case(c);
  if (c.mode != IbpfMode::Unconstrained) throw DomainError("case is not unconstrained");
  const double delta = c.spec.delta, a = c.spec.a;
  double total = 0.0;
  for (const auto& term : c.phi.terms) {
    if (term.coef == 0.0) continue;
    const SigmaContext ctx(delta, a, std::nullopt, term.m);
    const SLSolution& sl = ctx.sl();
    const double v = integrate_r(
        [&](double r) {
          const double hr = c.h.value(r);
          if (hr == 0.0) return 0.0;
          const double p = sl.phi(r);
          return hr / (p * p * p) * zeta_second_deriv(delta, a, sl.rho(r), c.zeta_route);
        },
        c);
    total += term.coef * ctx.K() * v;
  }
  return total;
}

double lhs_bridge_analytic(const IbpfCase& c) {
  check_case(c);
  const auto ap = end_point(c);
  double total = 0.0;
  for (const auto& term : c.phi.terms) {
    if (term.coef == 0.0) continue;
    const SigmaContext ctx(c.spec.delta, c.spec.a, ap, term.m);
    double v = integrate_r(
        [&](double r) {
          const double w = c.h.d2(r) - 2.0 * c.h.value(r) * term.m.density(r);
          if (w == 0.0) return 0.0;
          return w * ctx.mean_x_phi(r);
        },
        c);
    for (const auto& at : term.m.atoms()) {
      const double hv = at.t > 0.0 && at.t < 1.0 ? c.h.value(at.t) : 0.0;
      if (hv != 0.0 && at.weight != 0.0) v -= 2.0 * at.weight * hv * ctx.mean_x_phi(at.t);
    }
    total += term.coef * v;
  }
  return total;
}

double lhs_analytic(const IbpfCase& c) {
  return c.mode == IbpfMode::Unconstrained ? lhs_uncond_analytic(c) : lhs_bridge_analytic(c);
}

double rhs_ibpf(const IbpfCase& c) {
  check_case(c);
  const double delta = c.spec.delta;
  const SigmaFunctional sig(delta, c.spec.a, end_point(c), c.phi);
  const std::string branch = ibpf_branch(delta);
  if (branch == "delta3") {
    return -0.5 * integrate_r([&](double r) { return c.h.value(r) * sig.sigma(r, 0.0); }, c);
  }
  if (branch == "delta1") {
    // d^2/db^2 at 0 equals twice the s-coefficient
    return 0.25 * integrate_r(
                      [&](double r) {
                        const double hr = c.h.value(r);
                        if (hr == 0.0) return 0.0;
                        return hr * 2.0 * sig.series_in_s(r, 1).coeffs[1];
                      },
                      c);
  }
  const double alpha = 0.5 * (delta - 3.0);
  const double kappa = c.spec.kappa();
  return -0.5 * kappa * integrate_r(
                            [&](double r) {
                              const double hr = c.h.value(r);
                              if (hr == 0.0) return 0.0;
                              return hr * finite_part_mellin(alpha, sig.as_fn_s(r));
                            },
                            c);
}

double rhs_ibpf_unified(const IbpfCase& c) {
  check_case(c);
  const double delta = c.spec.delta;
  if (std::abs(delta - 2.0) < kUnifiedGuard) return std::numeric_limits<double>::quiet_NaN();
  const SigmaFunctional sig(delta, c.spec.a, end_point(c), c.phi);
  const double pre = -std::tgamma(delta) / (4.0 * (delta - 2.0));
  return pre * integrate_r(
                   [&](double r) {
                     const double hr = c.h.value(r);
                     if (hr == 0.0) return 0.0;
                     return hr * mu_pair(delta - 3.0, sig.as_fn_b(r));
                   },
                   c);
}

double gamma_3(double r, double a) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("gamma needs r in (0, 1)");
  if (!(a >= 0.0)) throw DomainError("gamma needs a >= 0");
  const double base = 1.0 / std::sqrt(2.0 * M_PI * std::pow(r * (1.0 - r), 3));
  if (a == 0.0) return base;
  const double a2 = a * a;
  return base * 2.0 * a2 * std::exp(-a2 / (2.0 * r * (1.0 - r))) / -std::expm1(-2.0 * a2);
}

double rhs_delta3_gamma(const IbpfCase& c) {
  check_case(c);
  if (ibpf_branch(c.spec.delta) != "delta3") throw DomainError("gamma route needs delta = 3");
  if (c.mode != IbpfMode::Bridge || c.spec.a != c.spec.a_prime) {
    throw DomainError("gamma route needs a bridge with a = a'");
  }
  const SigmaFunctional sig(3.0, c.spec.a, c.spec.a_prime, c.phi);
  const SigmaContext one(3.0, c.spec.a, c.spec.a_prime, FiniteMeasure::zero());
  return -integrate_r(
      [&](double r) {
        const double hr = c.h.value(r);
        if (hr == 0.0) return 0.0;
        return hr * gamma_3(r, c.spec.a) * sig.sigma(r, 0.0) / one.sigma(r, 0.0);
      },
      c);
}

McEstimate lhs_mc(const IbpfCase& c, long n, std::uint64_t seed, int jobs, McSampler which) {
  check_case(c);
  const GridMesh mesh(c.mesh_points);
  const ExpFunctional phi = c.phi.snapped(mesh);
  const int np = mesh.size();
  const double dx = mesh.step();
  std::vector<double> h(np), h2(np);
  for (int i = 0; i < np; ++i) {
    h[i] = c.h.value(mesh[i]);
    h2[i] = c.h.d2(mesh[i]);
  }
  struct TermData {
    double coef;
    std::vector<std::pair<int, double>> atoms;
    std::vector<double> dens;
  };
  std::vector<TermData> terms;
  for (const auto& t : phi.terms) {
    TermData td{t.coef, {}, std::vector<double>(np, 0.0)};
    for (const auto& at : t.m.atoms()) td.atoms.emplace_back(mesh.nearest(at.t), at.weight);
    bool any = false;
    for (int i = 0; i < np; ++i) {
      td.dens[i] = t.m.density(mesh[i]);
      any = any || td.dens[i] != 0.0;
    }
    if (!any) td.dens.clear();
    terms.push_back(std::move(td));
  }
  const double delta = c.spec.delta;
  const double kappa = c.spec.kappa();
  const bool drift = delta > 3.0;
  auto trap = [&](auto&& g) {
    double s = 0.5 * (g(0) + g(np - 1));
    for (int i = 1; i + 1 < np; ++i) s += g(i);
    return s * dx;
  };
  auto integrand = [&](const Path& X, std::vector<double>& out) {
    const auto& x = X.values();
    const double hpp = trap([&](int i) { return h2[i] * x[i]; });
    double hx3 = 0.0;
    if (drift) hx3 = trap([&](int i) { return h[i] == 0.0 ? 0.0 : h[i] / (x[i] * x[i] * x[i]); });
    double val = 0.0, dval = 0.0;
    for (const auto& td : terms) {
      double pair = 0.0, dir = 0.0;
      for (const auto& [idx, w] : td.atoms) {
        pair += w * x[idx] * x[idx];
        dir += w * h[idx] * x[idx];
      }
      if (!td.dens.empty()) {
        pair += trap([&](int i) { return td.dens[i] * x[i] * x[i]; });
        dir += trap([&](int i) { return td.dens[i] * h[i] * x[i]; });
      }
      const double e = std::exp(-pair);
      val += td.coef * (hpp - 2.0 * dir) * e;
      dval += td.coef * e;
    }
    out[0] = val;
    out[1] = drift ? -kappa * hx3 * dval : 0.0;
  };
  std::function<Path(RngStream&)> sampler;
  std::shared_ptr<BridgeSampler> bs;
  if (which == McSampler::GaussianModulus) {
    const double rd = std::round(delta);
    if (std::abs(delta - rd) > 1e-12 || rd < 1 || rd > 3) {
      throw DomainError("Gaussian-modulus sampler needs delta in {1, 2, 3}");
    }
    if (c.mode != IbpfMode::Bridge || c.spec.a_prime != 0.0) {
      throw DomainError("Gaussian-modulus sampler needs a bridge ending at 0");
    }
    const int d = static_cast<int>(rd);
    const double a = c.spec.a;
    sampler = [d, mesh, a](RngStream& rng) { return bessel_bridge_integer(d, mesh, rng, a); };
  } else if (c.mode == IbpfMode::Bridge) {
    bs = std::make_shared<BridgeSampler>(delta, c.spec.a, c.spec.a_prime, mesh);
    sampler = [bs](RngStream& rng) { return bs->sample(rng); };
  } else {
    const double a = c.spec.a;
    sampler = [delta, a, mesh](RngStream& rng) { return bessel_path(delta, a, mesh, rng); };
  }
  const auto res = mc_estimate_multi(integrand, 2, sampler, n, seed, jobs);
  return McEstimate{res[0].mean, res[0].std_error, res[1].mean, res[1].std_error};
}

VerifyReport verify(const IbpfCase& c, std::uint64_t seed, int jobs) {
  const auto t0 = std::chrono::steady_clock::now();
  VerifyReport rep;
  rep.case_id = c.id;
  rep.branch = ibpf_branch(c.spec.delta);
  rep.lhs_analytic = lhs_analytic(c);
  rep.rhs = rhs_ibpf(c);
  rep.rhs_unified = rhs_ibpf_unified(c);
  rep.abs_err = std::abs(rep.lhs_analytic - rep.rhs);
  rep.rel_err = relative_error(rep.lhs_analytic, rep.rhs);
  rep.unified_rel_err = std::isnan(rep.rhs_unified) ? 0.0 : relative_error(rep.rhs_unified, rep.rhs);
  rep.pass_analytic = rep.rel_err <= c.tol;
  if (c.mc_paths > 0) {
    rep.mc_run = true;
    const McEstimate mc = lhs_mc(c, c.mc_paths, seed, jobs);
    rep.lhs_mc = mc.mean;
    rep.mc_stderr = mc.std_error;
    IbpfCase snapped = c;
    snapped.phi = c.phi.snapped(GridMesh(c.mesh_points));
    rep.rhs_mc_case = rhs_ibpf(snapped);
    rep.pass_mc = std::abs(rep.lhs_mc - rep.rhs_mc_case) <= 3.0 * rep.mc_stderr;
  }
  rep.pass = rep.pass_analytic && rep.pass_mc;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace bessel_lab
