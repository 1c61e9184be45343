#include "bessel_lab/sturm_liouville.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bessel_lab/errors.hpp"

namespace bessel_lab {
namespace {

constexpr int kMaxOrder = 60;

// Taylor coefficients of y'' = 2 p(v) y with p(v) = sum p_i v^i
std::vector<double> series_solution(const std::vector<double>& p, double y0, double y1, int order) {
  std::vector<double> y(order + 1, 0.0);
  y[0] = y0;
  if (order >= 1) y[1] = y1;
  for (int n = 0; n + 2 <= order; ++n) {
    double acc = 0.0;
    for (int i = 0; i <= n && i < static_cast<int>(p.size()); ++i) acc += p[i] * y[n - i];
    y[n + 2] = 2.0 * acc / ((n + 2.0) * (n + 1.0));
  }
  return y;
}

// p(s + v) re-expanded in powers of v
std::vector<double> shift_poly(const std::vector<double>& c, double s) {
  const int n = static_cast<int>(c.size());
  std::vector<double> out(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double binom = 1.0;
    for (int i = 0; i <= j; ++i) {
      out[i] += c[j] * binom * std::pow(s, j - i);
      binom = binom * (j - i) / (i + 1.0);
    }
  }
  return out;
}

bool series_ok(const std::vector<double>& y, double h) {
  double total = 0.0, tail = 0.0, pw = 1.0;
  const int n = static_cast<int>(y.size());
  for (int j = 0; j < n; ++j) {
    const double t = std::abs(y[j]) * pw;
    total += t;
    if (j >= n - 4) tail += t;
    pw *= h;
  }
  return tail <= 1e-18 * total;
}

}  // namespace

void SLSolution::eval(const Segment& sg, double v, double& U, double& V, double& dU,
                      double& dV) const {
  switch (sg.kind) {
    case Kind::Linear:
      U = 1.0, V = v, dU = 0.0, dV = 1.0;
      return;
    case Kind::Hyperbolic: {
      const double th = sg.theta;
      const double c = std::cosh(th * v), s = std::sinh(th * v);
      U = c, V = s / th, dU = th * s, dV = c;
      return;
    }
    case Kind::Series: {
      U = V = dU = dV = 0.0;
      for (std::size_t j = sg.u.size(); j-- > 0;) {
        U = U * v + sg.u[j];
        V = V * v + sg.v[j];
        if (j > 0) {
          dU = dU * v + j * sg.u[j];
          dV = dV * v + j * sg.v[j];
        }
      }
      return;
    }
  }
}

const SLSolution::Segment& SLSolution::locate(double r) const {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("SL evaluation point outside [0, 1]");
  auto it = std::upper_bound(segs_.begin(), segs_.end(), r,
                             [](double x, const Segment& s) { return x < s.s; });
  if (it == segs_.begin()) return segs_.front();
  return *(it - 1);
}

double SLSolution::phi(double r) const {
  const Segment& sg = locate(r);
  double U, V, dU, dV;
  eval(sg, r - sg.s, U, V, dU, dV);
  return sg.phi_s * U + sg.dphi_s * V;
}

double SLSolution::dphi(double r) const {
  const Segment& sg = r >= 1.0 ? segs_.back() : locate(r);
  double U, V, dU, dV;
  eval(sg, r - sg.s, U, V, dU, dV);
  return sg.phi_s * dU + sg.dphi_s * dV;
}

double SLSolution::rho(double r) const {
  const Segment& sg = locate(r);
  double U, V, dU, dV;
  eval(sg, r - sg.s, U, V, dU, dV);
  const double p = sg.phi_s * U + sg.dphi_s * V;
  return sg.rho_s + V / (sg.phi_s * p);
}

double SLSolution::residual() const {
  double worst = 0.0;
  double ph = 1.0, dph = dphi0_right_;
  std::size_t ai = 0;
  for (std::size_t i = 0; i < segs_.size(); ++i) {
    const Segment& sg = segs_[i];
    while (ai < atoms_.size() && atoms_[ai].t <= sg.s) {
      if (atoms_[ai].t > 0.0) dph += 2.0 * atoms_[ai].weight * ph;
      ++ai;
    }
    worst = std::max(worst, std::abs(ph - sg.phi_s));
    worst = std::max(worst, std::abs(dph - sg.dphi_s));
    double U, V, dU, dV;
    eval(sg, sg.e - sg.s, U, V, dU, dV);
    const double np = ph * U + dph * V;
    dph = ph * dU + dph * dV;
    ph = np;
  }
  while (ai < atoms_.size()) {
    dph += 2.0 * atoms_[ai].weight * ph;
    ++ai;
  }
  return std::max(worst, std::abs(dph));
}

SLSolution solve_sl(const FiniteMeasure& m, double tol, const SLOptions& opts) {
  if (!(tol >= 1e-12 && tol <= 1e-4)) throw DomainError("SL tolerance must lie in [1e-12, 1e-4]");
  if (!(opts.max_step > 0.0)) throw DomainError("SL max_step must be positive");

  std::vector<double> edges{0.0};
  for (double b : m.breakpoints(0.0, 1.0)) edges.push_back(b);
  edges.push_back(1.0);

  SLSolution sol;
  sol.atoms_ = m.atoms();
  using Kind = SLSolution::Kind;
  using Segment = SLSolution::Segment;

  for (std::size_t c = 0; c + 1 < edges.size(); ++c) {
    const double lo = edges[c], hi = edges[c + 1];
    const double mid = 0.5 * (lo + hi);
    std::vector<double> poly;
    for (const auto& p : m.pieces()) {
      if (mid >= p.lo && mid <= p.hi) poly = p.coeffs;
    }
    while (!poly.empty() && poly.back() == 0.0) poly.pop_back();
    if (!opts.force_series && poly.empty()) {
      sol.segs_.push_back(Segment{lo, hi, Kind::Linear, 0.0, {}, {}, 0.0, 0.0, 0.0});
      continue;
    }
    if (!opts.force_series && poly.size() == 1) {
      sol.segs_.push_back(
          Segment{lo, hi, Kind::Hyperbolic, std::sqrt(2.0 * poly[0]), {}, {}, 0.0, 0.0, 0.0});
      continue;
    }
    sol.closed_form_ = false;
    if (poly.empty()) poly.push_back(0.0);
    double pmax = 0.0;
    for (int j = 0; j <= 16; ++j) pmax = std::max(pmax, std::abs(m.density(lo + (hi - lo) * j / 16.0)));
    double step = std::min(opts.max_step, 0.5 / std::sqrt(2.0 * pmax + 1.0));
    const int nsub = std::max(1, static_cast<int>(std::ceil((hi - lo) / step)));
    const double h = (hi - lo) / nsub;
    for (int k = 0; k < nsub; ++k) {
      const double s = lo + k * h;
      const double e = k + 1 == nsub ? hi : s + h;
      const auto local = shift_poly(poly, s);
      int order = 24;
      std::vector<double> u, v;
      for (;;) {
        u = series_solution(local, 1.0, 0.0, order);
        v = series_solution(local, 0.0, 1.0, order);
        if ((series_ok(u, e - s) && series_ok(v, e - s)) || order >= kMaxOrder) break;
        order += 12;
      }
      sol.segs_.push_back(Segment{s, e, Kind::Series, 0.0, u, v, 0.0, 0.0, 0.0});
    }
  }

  // backward sweep of psi from psi(1) = 1, psi'(1+) = 0
  const auto& atoms = m.atoms();
  auto atom_weight_at = [&](double t) {
    double w = 0.0;
    for (const auto& a : atoms) {
      if (a.t == t) w += a.weight;
    }
    return w;
  };
  double ps = 1.0;
  double dps = -2.0 * atom_weight_at(1.0);
  for (std::size_t i = sol.segs_.size(); i-- > 0;) {
    Segment& sg = sol.segs_[i];
    double U, V, dU, dV;
    sol.eval(sg, sg.e - sg.s, U, V, dU, dV);
    // inverse of [[U, V], [U', V']] (unit Wronskian)
    const double p0 = dV * ps - V * dps;
    const double d0 = -dU * ps + U * dps;
    sg.phi_s = p0;
    sg.dphi_s = d0;
    ps = p0;
    dps = d0;
    if (sg.s > 0.0) dps -= 2.0 * atom_weight_at(sg.s) * ps;
  }
  const double psi0 = sol.segs_.front().phi_s;
  if (!(psi0 > 0.0) || !std::isfinite(psi0)) {
    std::ostringstream os;
    os << "SL sweep produced a non-positive psi(0) = " << psi0;
    throw ConvergenceError(os.str());
  }

  double rho = 0.0;
  for (auto& sg : sol.segs_) {
    sg.phi_s /= psi0;
    sg.dphi_s /= psi0;
    sg.rho_s = rho;
    if (!(sg.phi_s > 0.0)) throw ConvergenceError("SL solution lost positivity");
    double U, V, dU, dV;
    sol.eval(sg, sg.e - sg.s, U, V, dU, dV);
    const double pe = sg.phi_s * U + sg.dphi_s * V;
    rho += V / (sg.phi_s * pe);
  }
  sol.rho1_ = rho;
  sol.phi1_ = sol.phi(1.0);
  sol.dphi0_right_ = sol.segs_.front().dphi_s;
  sol.dphi0_left_ = sol.dphi0_right_ - 2.0 * atom_weight_at(0.0);

  const double res = sol.residual();
  if (res > tol * std::max(1.0, std::abs(sol.dphi0_left_))) {
    std::ostringstream os;
    os << "SL residual " << res << " exceeds tolerance " << tol;
    throw ConvergenceError(os.str());
  }
  return sol;
}

double rho_of(const SLSolution& sol, double r) { return sol.rho(r); }

}  // namespace bessel_lab
