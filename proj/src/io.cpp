#include "bessel_lab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "bessel_lab/errors.hpp"

namespace bessel_lab {
namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(where + "." + key, "missing");
  return *it;
}

double num(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "must be finite");
  return v;
}

double num_or(const json& j, const char* key, double dflt, const std::string& where) {
  if (!j.contains(key)) return dflt;
  return num(j.at(key), where + "." + key);
}

long integer(const json& j, const std::string& where) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) fail(where, "expected an integer");
  return j.get<long>();
}

long int_or(const json& j, const char* key, long dflt, const std::string& where) {
  if (!j.contains(key)) return dflt;
  return integer(j.at(key), where + "." + key);
}

std::string str(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

// turn model-level DomainErrors into ParseErrors that carry the field
template <class F>
auto guarded(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    fail(where, e.what());
  }
}

}  // namespace

FiniteMeasure measure_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object with atoms and pieces");
  std::vector<Atom> atoms;
  std::vector<DensityPiece> pieces;
  if (j.contains("atoms")) {
    const json& a = j.at("atoms");
    if (!a.is_array()) fail(where + ".atoms", "expected an array");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string w = where + ".atoms[" + std::to_string(i) + "]";
      atoms.push_back({num(need(a[i], "t", w), w + ".t"), num(need(a[i], "w", w), w + ".w")});
    }
  }
  if (j.contains("pieces")) {
    const json& p = j.at("pieces");
    if (!p.is_array()) fail(where + ".pieces", "expected an array");
    for (std::size_t i = 0; i < p.size(); ++i) {
      const std::string w = where + ".pieces[" + std::to_string(i) + "]";
      DensityPiece piece{num(need(p[i], "lo", w), w + ".lo"), num(need(p[i], "hi", w), w + ".hi"), {}};
      const json& c = need(p[i], "coeffs", w);
      if (!c.is_array()) fail(w + ".coeffs", "expected an array");
      for (std::size_t k = 0; k < c.size(); ++k) {
        piece.coeffs.push_back(num(c[k], w + ".coeffs[" + std::to_string(k) + "]"));
      }
      pieces.push_back(std::move(piece));
    }
  }
  return guarded(where, [&] { return FiniteMeasure(std::move(atoms), std::move(pieces)); });
}

json measure_to_json(const FiniteMeasure& m) {
  json j;
  j["atoms"] = json::array();
  for (const auto& a : m.atoms()) j["atoms"].push_back({{"t", a.t}, {"w", a.weight}});
  j["pieces"] = json::array();
  for (const auto& p : m.pieces()) j["pieces"].push_back({{"lo", p.lo}, {"hi", p.hi}, {"coeffs", p.coeffs}});
  return j;
}

ExpFunctional functional_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of {coef, m} terms");
  if (j.empty()) fail(where, "needs at least one term");
  ExpFunctional phi;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    const double c = num_or(j[i], "coef", 1.0, w);
    phi.terms.push_back({c, measure_from_json(need(j[i], "m", w), w + ".m")});
  }
  return phi;
}

TestFunctionC2c test_fn_from_json(const json& j, const std::string& where) {
  const std::string fam = str(need(j, "family", where), where + ".family");
  const double theta = num(need(j, "theta", where), where + ".theta");
  if (fam == "bump") return guarded(where, [&] { return TestFunctionC2c::bump(theta); });
  if (fam == "quintic") {
    const double ramp = num(need(j, "ramp", where), where + ".ramp");
    return guarded(where, [&] { return TestFunctionC2c::quintic_plateau(theta, ramp); });
  }
  fail(where + ".family", "unknown family '" + fam + "' (bump, quintic)");
}

json test_fn_to_json(const TestFunctionC2c& h) {
  if (h.family() == TestFunctionC2c::Family::Bump) return {{"family", "bump"}, {"theta", h.theta()}};
  return {{"family", "quintic"}, {"theta", h.theta()}, {"ramp", h.ramp()}};
}

IbpfCase case_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  const std::string id = str(need(j, "id", where), where + ".id");
  const double delta = num(need(j, "delta", where), where + ".delta");
  if (!(delta > 0.0)) fail(where + ".delta", "must be positive");
  const double a = num_or(j, "a", 0.0, where);
  const double ap = num_or(j, "a_prime", 0.0, where);
  if (a < 0.0) fail(where + ".a", "must be >= 0");
  if (ap < 0.0) fail(where + ".a_prime", "must be >= 0");
  ExpFunctional phi;
  if (j.contains("phi")) {
    phi = functional_from_json(j.at("phi"), where + ".phi");
  } else if (j.contains("m")) {
    phi = ExpFunctional::single(measure_from_json(j.at("m"), where + ".m"));
  } else {
    phi = ExpFunctional::single(FiniteMeasure::zero());  // Phi = 1
  }
  const TestFunctionC2c h = j.contains("h") ? test_fn_from_json(j.at("h"), where + ".h")
                                            : TestFunctionC2c::bump(0.2);
  IbpfCase c{id, BridgeSpec{delta, a, ap}, std::move(phi), h};
  if (j.contains("mode")) {
    const std::string mode = str(j.at("mode"), where + ".mode");
    if (mode == "bridge") {
      c.mode = IbpfMode::Bridge;
    } else if (mode == "unconstrained") {
      c.mode = IbpfMode::Unconstrained;
    } else {
      fail(where + ".mode", "expected bridge or unconstrained");
    }
  }
  c.tol = num_or(j, "tol", c.tol, where);
  if (!(c.tol > 0.0)) fail(where + ".tol", "must be positive");
  c.mc_paths = int_or(j, "mc_paths", 0, where);
  if (c.mc_paths < 0) fail(where + ".mc_paths", "must be >= 0");
  c.mesh_points = static_cast<int>(int_or(j, "mesh_points", c.mesh_points, where));
  if (c.mesh_points < 3 || c.mesh_points > 2049) fail(where + ".mesh_points", "must lie in [3, 2049]");
  if (j.contains("zeta_route")) {
    const std::string r = str(j.at("zeta_route"), where + ".zeta_route");
    if (r == "finite_part") {
      c.zeta_route = ZetaRoute::FinitePart;
    } else if (r == "finite_difference") {
      c.zeta_route = ZetaRoute::FiniteDifference;
    } else {
      fail(where + ".zeta_route", "expected finite_part or finite_difference");
    }
  }
  return c;
}

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offset -> line and column
    const std::size_t pos = std::min<std::size_t>(e.byte, text.size());
    int line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < pos; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << source << ":" << line << ":" << col << ": malformed JSON";
    throw ParseError(os.str());
  }
}

SpdeSettings spde_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  SpdeSettings s;
  auto& c = s.cfg;
  c.K = static_cast<int>(int_or(j, "K", c.K, where));
  c.dt = num_or(j, "dt", c.dt, where);
  c.T = num_or(j, "T", c.T, where);
  c.eps = num_or(j, "eps", c.eps, where);
  c.eta = num_or(j, "eta", c.eta, where);
  c.mesh_points = static_cast<int>(int_or(j, "mesh_points", c.mesh_points, where));
  c.record_every = static_cast<int>(int_or(j, "record_every", c.record_every, where));
  s.replicas = static_cast<int>(int_or(j, "replicas", s.replicas, where));
  s.theta = num_or(j, "theta", s.theta, where);
  if (c.K < 1) fail(where + ".K", "must be positive");
  if (!(c.dt > 0.0)) fail(where + ".dt", "must be positive");
  if (!(c.T > 0.0)) fail(where + ".T", "must be positive");
  if (!(c.eta > 0.0 && c.eta < c.eps)) fail(where + ".eta", "need 0 < eta < eps");
  if (s.replicas < 2) fail(where + ".replicas", "need at least 2");
  if (!(s.theta > 0.0 && s.theta < 0.5)) fail(where + ".theta", "must lie in (0, 1/2)");
  return s;
}

SuiteConfig suite_from_json(const json& j) {
  if (!j.is_object()) fail("config", "expected an object");
  SuiteConfig s;
  if (j.contains("seed")) {
    const json& v = j.at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long>() >= 0)) {
      fail("seed", "expected a non-negative integer");
    }
    s.seed = v.get<std::uint64_t>();
  }
  if (j.contains("mc")) {
    s.mc = integer(j.at("mc"), "mc");
    if (*s.mc < 0) fail("mc", "must be >= 0");
  }
  if (j.contains("tol")) {
    s.tol = num(j.at("tol"), "tol");
    if (!(*s.tol > 0.0)) fail("tol", "must be positive");
  }
  s.jobs = static_cast<int>(int_or(j, "jobs", 0, "config"));
  if (s.jobs < 0) fail("jobs", "must be >= 0");
  if (j.contains("out")) s.out = str(j.at("out"), "out");
  if (j.contains("cases")) {
    const json& cs = j.at("cases");
    if (!cs.is_array()) fail("cases", "expected an array");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string w = "cases[" + std::to_string(i) + "]";
      IbpfCase c = case_from_json(cs[i], w);
      if (!ids.insert(c.id).second) fail(w + ".id", "duplicate case id '" + c.id + "'");
      s.cases.push_back(std::move(c));
    }
  }
  if (j.contains("spde")) s.spde = spde_from_json(j.at("spde"));
  return s;
}

SuiteConfig load_suite(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open config");
  std::ostringstream ss;
  ss << in.rdbuf();
  return suite_from_json(parse_json_text(ss.str(), path));
}

json report_to_json(const VerifyReport& r) {
  json j;
  j["case_id"] = r.case_id;
  j["branch"] = r.branch;
  j["lhs_analytic"] = r.lhs_analytic;
  j["lhs_mc"] = r.mc_run ? json(r.lhs_mc) : json(nullptr);
  j["stderr"] = r.mc_run ? json(r.mc_stderr) : json(nullptr);
  j["rhs"] = r.rhs;
  j["rhs_unified"] = std::isnan(r.rhs_unified) ? json(nullptr) : json(r.rhs_unified);
  j["abs_err"] = r.abs_err;
  j["rel_err"] = r.rel_err;
  j["pass"] = r.pass;
  return j;
}

json spde_summary_to_json(const SpdeDiagnostics& d, const SpdeSettings& s) {
  json j;
  j["K"] = s.cfg.K;
  j["dt"] = s.cfg.dt;
  j["T"] = s.cfg.T;
  j["eps"] = s.cfg.eps;
  j["eta"] = s.cfg.eta;
  j["replicas"] = d.replicas;
  j["h_l2_sq"] = d.h_l2_sq;
  j["bracket_ratio"] = d.bracket_ratio;
  j["bracket_ratio_stderr"] = d.bracket_ratio_stderr;
  j["regression"] = {{"coef", d.reg_coef}, {"stderr", d.reg_stderr}};
  j["ks_stationarity_p"] = d.ks_stationarity_p;
  return j;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw DomainError("CSV header and column count differ");
  for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
  os << "\n";
  const std::size_t rows = columns.empty() ? 0 : columns[0].size();
  for (const auto& col : columns) {
    if (col.size() != rows) throw DomainError("CSV columns have different lengths");
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << format_number(columns[c][r]);
    os << "\n";
  }
}

void write_path_csv(std::ostream& os, const Path& p) {
  write_csv(os, {"r", "value"}, {p.mesh().points(), p.values()});
}

}  // namespace bessel_lab
