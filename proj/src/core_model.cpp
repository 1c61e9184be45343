#include "bessel_lab/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bessel_lab/errors.hpp"

namespace bessel_lab {

GridMesh::GridMesh(int n) : n_(n) {
  if (n < 3) throw DomainError("mesh needs at least 3 points");
}

std::vector<double> GridMesh::points() const {
  std::vector<double> p(n_);
  for (int i = 0; i < n_; ++i) p[i] = (*this)[i];
  return p;
}

int GridMesh::nearest(double t) const {
  const long i = std::lround(t * (n_ - 1));
  return static_cast<int>(std::clamp<long>(i, 0, n_ - 1));
}

Path::Path(GridMesh mesh, std::vector<double> values) : mesh_(mesh), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != mesh_.size()) {
    throw DomainError("path length does not match its mesh");
  }
}

double Path::at(double t) const {
  if (t <= 0.0) return values_.front();
  if (t >= 1.0) return values_.back();
  const double u = t * (mesh_.size() - 1);
  const int i = std::min(static_cast<int>(u), mesh_.size() - 2);
  const double w = u - i;
  return (1.0 - w) * values_[i] + w * values_[i + 1];
}

double DensityPiece::operator()(double r) const {
  double v = 0.0;
  for (std::size_t j = coeffs.size(); j-- > 0;) v = v * r + coeffs[j];
  return v;
}

FiniteMeasure::FiniteMeasure(std::vector<Atom> atoms, std::vector<DensityPiece> pieces)
    : atoms_(std::move(atoms)), pieces_(std::move(pieces)) {
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom& x, const Atom& y) { return x.t < y.t; });
  std::sort(pieces_.begin(), pieces_.end(),
            [](const DensityPiece& x, const DensityPiece& y) { return x.lo < y.lo; });
  validate();
}

FiniteMeasure FiniteMeasure::dirac(double t, double weight) {
  return FiniteMeasure({Atom{t, weight}}, {});
}

FiniteMeasure FiniteMeasure::constant_density(double c, double lo, double hi) {
  return FiniteMeasure({}, {DensityPiece{lo, hi, {c}}});
}

void FiniteMeasure::validate() const {
  for (const auto& a : atoms_) {
    if (!(a.t >= 0.0 && a.t <= 1.0)) throw DomainError("atom location outside [0, 1]");
    if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) throw DomainError("atom weight must be >= 0");
  }
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    if (!(p.lo >= 0.0 && p.hi <= 1.0 && p.lo < p.hi)) throw DomainError("density piece outside [0, 1]");
    if (i > 0 && p.lo < pieces_[i - 1].hi) throw DomainError("density pieces overlap");
    for (double c : p.coeffs) {
      if (!std::isfinite(c)) throw DomainError("density coefficient not finite");
    }
    for (int j = 0; j <= 64; ++j) {
      const double r = p.lo + (p.hi - p.lo) * j / 64.0;
      if (p(r) < -1e-14) throw DomainError("density must be nonnegative");
    }
  }
}

bool FiniteMeasure::is_zero() const {
  for (const auto& a : atoms_) {
    if (a.weight != 0.0) return false;
  }
  for (const auto& p : pieces_) {
    for (double c : p.coeffs) {
      if (c != 0.0) return false;
    }
  }
  return true;
}

double FiniteMeasure::density(double r) const {
  double v = 0.0;
  for (const auto& p : pieces_) {
    if (r >= p.lo && r <= p.hi) v += p(r);
  }
  return v;
}

double FiniteMeasure::mass() const {
  double total = 0.0;
  for (const auto& a : atoms_) total += a.weight;
  for (const auto& p : pieces_) {
    for (std::size_t j = 0; j < p.coeffs.size(); ++j) {
      const double e = j + 1.0;
      total += p.coeffs[j] * (std::pow(p.hi, e) - std::pow(p.lo, e)) / e;
    }
  }
  return total;
}

std::vector<double> FiniteMeasure::breakpoints(double lo, double hi) const {
  std::vector<double> out;
  auto add = [&](double t) {
    if (t > lo && t < hi) out.push_back(t);
  };
  for (const auto& a : atoms_) add(a.t);
  for (const auto& p : pieces_) {
    add(p.lo);
    add(p.hi);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

FiniteMeasure FiniteMeasure::snapped(const GridMesh& mesh) const {
  std::vector<Atom> atoms = atoms_;
  for (auto& a : atoms) a.t = mesh[mesh.nearest(a.t)];
  return FiniteMeasure(std::move(atoms), pieces_);
}

FiniteMeasure FiniteMeasure::scaled(double c) const {
  std::vector<Atom> atoms = atoms_;
  std::vector<DensityPiece> pieces = pieces_;
  for (auto& a : atoms) a.weight *= c;
  for (auto& p : pieces) {
    for (auto& v : p.coeffs) v *= c;
  }
  return FiniteMeasure(std::move(atoms), std::move(pieces));
}

ExpFunctional ExpFunctional::snapped(const GridMesh& mesh) const {
  ExpFunctional out;
  for (const auto& t : terms) out.terms.push_back({t.coef, t.m.snapped(mesh)});
  return out;
}

int BridgeSpec::k() const { return static_cast<int>(std::floor((3.0 - delta) / 2.0)); }

// ---------------------------------------------------------------- test functions

TestFunctionC2c::TestFunctionC2c(Family f, double theta, double ramp)
    : family_(f), theta_(theta), ramp_(ramp) {
  if (!(theta > 0.0 && theta < 0.5)) throw DomainError("support margin must lie in (0, 1/2)");
  if (f == Family::QuinticPlateau && !(ramp > 0.0 && ramp <= 0.5 - theta)) {
    throw DomainError("ramp width must lie in (0, 1/2 - theta]");
  }
}

TestFunctionC2c TestFunctionC2c::bump(double theta) {
  TestFunctionC2c h(Family::Bump, theta, 0.0);
  const double p = (0.5 - theta) * (0.5 - theta);
  h.norm_ = std::exp(1.0 / p);
  return h;
}

TestFunctionC2c TestFunctionC2c::quintic_plateau(double theta, double ramp) {
  return TestFunctionC2c(Family::QuinticPlateau, theta, ramp);
}

std::vector<double> TestFunctionC2c::kinks() const {
  if (family_ == Family::Bump) return {};
  std::vector<double> k{theta_ + ramp_, 1.0 - theta_ - ramp_};
  if (k[0] >= k[1]) k.resize(1);
  return k;
}

std::string TestFunctionC2c::describe() const {
  std::ostringstream os;
  if (family_ == Family::Bump) {
    os << "bump(theta=" << theta_ << ")";
  } else {
    os << "quintic(theta=" << theta_ << ",ramp=" << ramp_ << ")";
  }
  return os.str();
}

namespace {

void smoothstep(double x, double out[3]) {
  if (x <= 0.0) {
    out[0] = out[1] = out[2] = 0.0;
  } else if (x >= 1.0) {
    out[0] = 1.0;
    out[1] = out[2] = 0.0;
  } else {
    const double x2 = x * x;
    out[0] = x2 * x * (10.0 - 15.0 * x + 6.0 * x2);
    out[1] = 30.0 * x2 * (1.0 - 2.0 * x + x2);
    out[2] = 60.0 * x * (1.0 - 3.0 * x + 2.0 * x2);
  }
}

}  // namespace

double TestFunctionC2c::eval(double r, int order) const {
  if (r <= theta_ || r >= 1.0 - theta_) return 0.0;
  if (family_ == Family::Bump) {
    const double p = (r - theta_) * (1.0 - theta_ - r);
    const double dp = 1.0 - 2.0 * r;
    const double h = norm_ * std::exp(-1.0 / p);
    if (order == 0) return h;
    const double g1 = dp / (p * p);
    if (order == 1) return h * g1;
    const double g2 = -2.0 / (p * p) - 2.0 * dp * dp / (p * p * p);
    return h * (g2 + g1 * g1);
  }
  double L[3], R[3];
  smoothstep((r - theta_) / ramp_, L);
  smoothstep((1.0 - theta_ - r) / ramp_, R);
  const double w = ramp_;
  const double l0 = L[0], l1 = L[1] / w, l2 = L[2] / (w * w);
  const double r0 = R[0], r1 = -R[1] / w, r2 = R[2] / (w * w);
  if (order == 0) return l0 * r0;
  if (order == 1) return l1 * r0 + l0 * r1;
  return l2 * r0 + 2.0 * l1 * r1 + l0 * r2;
}

// ---------------------------------------------------------------- pairings

namespace {

// trapezoid of g(r) X(r)^p over [lo, hi] on the path's mesh, X interpolated at the ends
template <class G>
double trapezoid_piece(const Path& X, double lo, double hi, G&& g) {
  const GridMesh& mesh = X.mesh();
  const int n = mesh.size();
  const double h = mesh.step();
  int i0 = static_cast<int>(std::ceil(lo / h - 1e-12));
  int i1 = static_cast<int>(std::floor(hi / h + 1e-12));
  i0 = std::clamp(i0, 0, n - 1);
  i1 = std::clamp(i1, 0, n - 1);
  double prev_r = lo;
  double prev_v = g(lo, X.at(lo));
  double sum = 0.0;
  for (int i = i0; i <= i1; ++i) {
    const double r = mesh[i];
    if (r <= lo || r >= hi) continue;
    const double v = g(r, X[i]);
    sum += 0.5 * (r - prev_r) * (prev_v + v);
    prev_r = r;
    prev_v = v;
  }
  const double v = g(hi, X.at(hi));
  sum += 0.5 * (hi - prev_r) * (prev_v + v);
  return sum;
}

double pair_impl(const FiniteMeasure& m, const Path& X) {
  double total = 0.0;
  for (const auto& a : m.atoms()) {
    const double x = X.at(a.t);
    total += a.weight * x * x;
  }
  for (const auto& p : m.pieces()) {
    total += trapezoid_piece(X, p.lo, p.hi, [&](double r, double x) { return p(r) * x * x; });
  }
  return total;
}

// integral of h X against m
double pair_hm_X(const FiniteMeasure& m, const TestFunctionC2c& h, const Path& X) {
  double total = 0.0;
  for (const auto& a : m.atoms()) total += a.weight * h.value(a.t) * X.at(a.t);
  for (const auto& p : m.pieces()) {
    const double lo = std::max(p.lo, h.lo());
    const double hi = std::min(p.hi, h.hi());
    if (lo >= hi) continue;
    total += trapezoid_piece(X, lo, hi, [&](double r, double x) { return p(r) * h.value(r) * x; });
  }
  return total;
}

}  // namespace

double pair_m_X2(const FiniteMeasure& m, const Path& X) { return pair_impl(m, X); }

PairingCheck pair_m_X2_checked(const FiniteMeasure& m, const Path& X, double rel_tol) {
  const double fine = pair_impl(m, X);
  const int n = X.mesh().size();
  if (n % 2 == 0 || n < 5) return {fine, fine, false};
  std::vector<double> coarse_vals;
  for (int i = 0; i < n; i += 2) coarse_vals.push_back(X[i]);
  const Path coarse(GridMesh((n + 1) / 2), std::move(coarse_vals));
  const double c = pair_impl(m, coarse);
  const double est = fine + (fine - c) / 3.0;
  const bool warn = std::abs(fine - c) / 3.0 > rel_tol * std::max(std::abs(fine), 1e-300);
  return {fine, est, warn};
}

double eval_phi(const ExpFunctional& phi, const Path& X) {
  double total = 0.0;
  for (const auto& t : phi.terms) total += t.coef * std::exp(-pair_m_X2(t.m, X));
  return total;
}

double dir_deriv_phi(const ExpFunctional& phi, const TestFunctionC2c& h, const Path& X) {
  double total = 0.0;
  for (const auto& t : phi.terms) {
    if (t.m.is_zero()) continue;
    total += t.coef * (-2.0 * pair_hm_X(t.m, h, X)) * std::exp(-pair_m_X2(t.m, X));
  }
  return total;
}

double pair_fn_path(const std::vector<double>& g, const Path& X) {
  const int n = X.mesh().size();
  if (static_cast<int>(g.size()) != n) throw DomainError("weight length does not match path");
  double s = 0.5 * (g[0] * X[0] + g[n - 1] * X[n - 1]);
  for (int i = 1; i < n - 1; ++i) s += g[i] * X[i];
  return s * X.mesh().step();
}

}  // namespace bessel_lab
