#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bessel_lab/errors.hpp"
#include "bessel_lab/io.hpp"
#include "bessel_lab/laplace_sigma.hpp"
#include "bessel_lab/mu_dist.hpp"
#include "bessel_lab/samplers.hpp"
#include "bessel_lab/specfun.hpp"
#include "bessel_lab/sturm_liouville.hpp"
#include "suite.hpp"

using namespace bessel_lab;
using bessel_lab::cli::kParseError;
using bessel_lab::cli::kPartialFailure;
using bessel_lab::cli::kPass;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw DomainError("need at least 2 points");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

// stdout when path is empty
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --measure takes inline JSON, --config a file holding {"m": {...}} or the bare measure
FiniteMeasure measure_arg(const std::string& inline_json, const std::string& file) {
  if (!inline_json.empty()) return measure_from_json(parse_json_text(inline_json, "--measure"), "measure");
  if (!file.empty()) {
    const json j = parse_json_text(read_file(file), file);
    return j.contains("m") ? measure_from_json(j.at("m"), "m") : measure_from_json(j, "m");
  }
  return FiniteMeasure::zero();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bessel bridge integration-by-parts toolkit"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out, config, measure_json;
  std::optional<long> mc;
  std::optional<double> tol;
  std::optional<int> jobs;
  double delta = 2.0, a = 0.0, r = 0.5, bmax = 4.0;
  std::optional<double> ap;
  int points = 201;

  auto* density = app.add_subcommand("density", "density of X_r (bridge) or X_t (process) as CSV b,p");
  density->add_option("--delta", delta)->required();
  density->add_option("--r", r, "time in (0, 1)");
  density->add_option("--a", a);
  density->add_option("--ap", ap, "end point; omit for the unconditioned process");
  density->add_option("--bmax", bmax);
  density->add_option("--points", points);
  density->add_option("--out", out);

  double alpha = 0.5, lambda = 1.0;
  std::string fn_name = "exp";
  auto* mu = app.add_subcommand("mu", "pairing <mu_alpha, f> as CSV alpha,value");
  mu->add_option("--alpha", alpha)->required();
  mu->add_option("--fn", fn_name, "exp, gauss or linexp")->check(CLI::IsMember({"exp", "gauss", "linexp"}));
  mu->add_option("--lambda", lambda, "rate of the exp test function");
  mu->add_option("--out", out);

  double sl_tol = 1e-12;
  auto* sl = app.add_subcommand("sl-solve", "solve phi'' = phi m as CSV r,phi,phi_prime,rho");
  sl->add_option("--measure", measure_json, "measure as inline JSON");
  sl->add_option("--config", config, "JSON file with the measure");
  sl->add_option("--points", points);
  sl->add_option("--tol", sl_tol);
  sl->add_option("--out", out);

  auto* sigma = app.add_subcommand("sigma", "Sigma(r, b) over b as CSV b,sigma");
  sigma->add_option("--delta", delta)->required();
  sigma->add_option("--a", a);
  sigma->add_option("--ap", ap, "end point; omit for the unconditioned process");
  sigma->add_option("--r", r);
  sigma->add_option("--measure", measure_json);
  sigma->add_option("--config", config);
  sigma->add_option("--bmax", bmax);
  sigma->add_option("--points", points);
  sigma->add_option("--out", out);

  auto add_suite_flags = [&](CLI::App* sc) {
    sc->add_option("--config", config)->required();
    sc->add_option("--seed", seed);
    sc->add_option("--mc", mc, "Monte Carlo paths per case");
    sc->add_option("--tol", tol);
    sc->add_option("--jobs", jobs);
    sc->add_option("--out", out, "output directory");
  };
  auto* ibpf = app.add_subcommand("ibpf-check", "check the integration by parts identity per case");
  add_suite_flags(ibpf);
  auto* suite = app.add_subcommand("run-suite", "run a suite config: cases plus optional SPDE block");
  add_suite_flags(suite);

  long n = 10;
  auto* sample = app.add_subcommand("sample", "sample Bessel bridge paths as CSV r,path0,...");
  sample->add_option("--delta", delta)->required();
  sample->add_option("--a", a);
  sample->add_option("--ap", ap);
  sample->add_option("--n", n);
  sample->add_option("--points", points);
  sample->add_option("--seed", seed);
  sample->add_option("--out", out);

  SpdeSettings spde;
  auto* sp = app.add_subcommand("spde-sim", "simulate u = |v| and the decomposition diagnostics");
  sp->add_option("--K", spde.cfg.K);
  sp->add_option("--dt", spde.cfg.dt);
  sp->add_option("--T", spde.cfg.T);
  sp->add_option("--eps", spde.cfg.eps);
  sp->add_option("--eta", spde.cfg.eta);
  sp->add_option("--mesh-points", spde.cfg.mesh_points);
  sp->add_option("--record-every", spde.cfg.record_every, "steps between recorded samples");
  sp->add_option("--replicas", spde.replicas);
  sp->add_option("--theta", spde.theta, "h = bump(theta)");
  sp->add_option("--seed", seed);
  sp->add_option("--jobs", jobs);
  sp->add_option("--out", out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kParseError;
  }

  try {
    if (*density) {
      const auto bs = linspace(0.0, bmax, points);
      std::vector<double> ps;
      for (double b : bs) ps.push_back(ap ? bridge_density(delta, r, a, *ap, b) : p_delta_t(delta, r, a, b));
      std::ostringstream os;
      write_csv(os, {"b", "p"}, {bs, ps});
      emit(out, os.str());
    } else if (*mu) {
      const double v = mu_pair(alpha, SmoothTestFn::by_name(fn_name, lambda));
      std::ostringstream os;
      write_csv(os, {"alpha", "value"}, {{alpha}, {v}});
      emit(out, os.str());
    } else if (*sl) {
      const SLSolution s = solve_sl(measure_arg(measure_json, config), sl_tol);
      const auto rs = linspace(0.0, 1.0, points);
      std::vector<double> phi, dphi, rho;
      for (double x : rs) {
        phi.push_back(s.phi(x));
        dphi.push_back(s.dphi(x));
        rho.push_back(s.rho(x));
      }
      std::ostringstream os;
      write_csv(os, {"r", "phi", "phi_prime", "rho"}, {rs, phi, dphi, rho});
      emit(out, os.str());
    } else if (*sigma) {
      const SigmaContext ctx(delta, a, ap, measure_arg(measure_json, config));
      const auto bs = linspace(0.0, bmax, points);
      std::vector<double> v;
      for (double b : bs) v.push_back(ctx.sigma(r, b));
      std::ostringstream os;
      write_csv(os, {"b", "sigma"}, {bs, v});
      emit(out, os.str());
    } else if (*ibpf || *suite) {
      cli::SuiteOverrides ov;
      if (ibpf->count("--seed") || suite->count("--seed")) ov.seed = seed;
      ov.mc = mc;
      ov.tol = tol;
      ov.jobs = jobs;
      if (!out.empty()) ov.out = out;
      SuiteConfig cfg = load_suite(config);
      return *ibpf ? cli::run_ibpf_check(std::move(cfg), ov) : cli::run_suite(std::move(cfg), ov);
    } else if (*sample) {
      const GridMesh mesh(points);
      const BridgeSampler sampler(delta, a, ap.value_or(0.0), mesh);
      std::vector<std::string> header{"r"};
      std::vector<std::vector<double>> cols{mesh.points()};
      for (long i = 0; i < n; ++i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        header.push_back("path" + std::to_string(i));
        cols.push_back(sampler.sample(rng).values());
      }
      std::ostringstream os;
      write_csv(os, header, cols);
      emit(out, os.str());
    } else if (*sp) {
      if (!(spde.cfg.eta > 0.0 && spde.cfg.eta < spde.cfg.eps)) throw DomainError("need 0 < eta < eps");
      const auto h = TestFunctionC2c::bump(spde.theta);
      const SpdeDiagnostics d =
          spde_diagnostics(h, spde.cfg, spde.replicas, seed, cli::resolve_jobs(jobs, 0));
      const std::string summary = spde_summary_to_json(d, spde).dump(2) + "\n";
      if (out.empty()) {
        std::cout << summary;
      } else {
        const std::filesystem::path dir(out);
        std::filesystem::create_directories(dir);
        emit((dir / "summary.json").string(), summary);
        for (std::size_t i = 0; i < d.series.size(); ++i) {
          const auto& x = d.series[i];
          std::ostringstream os;
          write_csv(os, {"t", "uh", "n", "m"}, {x.t, x.uh, x.n, x.m});
          emit((dir / ("replica_" + std::to_string(i) + ".csv")).string(), os.str());
        }
      }
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kParseError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPartialFailure;
  }
  return kPass;
}
