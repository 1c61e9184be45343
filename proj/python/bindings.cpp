#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bessel_lab/errors.hpp"
#include "bessel_lab/ibpf_engine.hpp"
#include "bessel_lab/io.hpp"
#include "bessel_lab/laplace_sigma.hpp"
#include "bessel_lab/mu_dist.hpp"
#include "bessel_lab/samplers.hpp"
#include "bessel_lab/specfun.hpp"
#include "bessel_lab/sturm_liouville.hpp"

namespace py = pybind11;
using namespace bessel_lab;

namespace {

FiniteMeasure measure_arg(const std::string& text) {
  return text.empty() ? FiniteMeasure::zero() : measure_from_json(parse_json_text(text, "measure"), "measure");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bessel bridge densities, Sturm-Liouville transforms and integration by parts checks";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<SamplerError>(m, "SamplerError", PyExc_RuntimeError);

  m.def("bessel_i_scaled", &bessel_i_scaled, py::arg("nu"), py::arg("z"), "e^{-z} I_nu(z)");
  m.def("q_delta_t", &q_delta_t, py::arg("delta"), py::arg("t"), py::arg("x"), py::arg("y"),
        "squared Bessel transition density");
  m.def("p_delta_t", &p_delta_t, py::arg("delta"), py::arg("t"), py::arg("a"), py::arg("b"),
        "Bessel transition density");
  m.def("bridge_density", &bridge_density, py::arg("delta"), py::arg("r"), py::arg("a"), py::arg("a_prime"),
        py::arg("b"), "density of X_r under the bridge a -> a_prime");

  m.def(
      "mu_pair",
      [](double alpha, const std::string& fn, double lam) { return mu_pair(alpha, SmoothTestFn::by_name(fn, lam)); },
      py::arg("alpha"), py::arg("fn") = "exp", py::arg("lam") = 1.0,
      "<mu_alpha, f> for f in {exp, gauss, linexp}");

  m.def(
      "solve_sl",
      [](const std::string& measure, const std::vector<double>& rs) {
        const SLSolution s = solve_sl(measure_arg(measure));
        std::vector<double> phi, dphi, rho;
        for (double r : rs) {
          phi.push_back(s.phi(r));
          dphi.push_back(s.dphi(r));
          rho.push_back(s.rho(r));
        }
        return py::dict(py::arg("phi") = phi, py::arg("dphi") = dphi, py::arg("rho") = rho);
      },
      py::arg("measure"), py::arg("r"), "phi, phi' and rho at the given times; measure as JSON");

  m.def(
      "sigma",
      [](double delta, double a, std::optional<double> ap, const std::string& measure, double r,
         const std::vector<double>& bs) {
        const SigmaContext ctx(delta, a, ap, measure_arg(measure));
        std::vector<double> out;
        for (double b : bs) out.push_back(ctx.sigma(r, b));
        return out;
      },
      py::arg("delta"), py::arg("a"), py::arg("a_prime"), py::arg("measure"), py::arg("r"), py::arg("b"));

  m.def("zeta", &zeta, py::arg("delta"), py::arg("a"), py::arg("t"), "E[X_t] for the process started at a");
  m.def(
      "zeta_second_deriv",
      [](double delta, double a, double t, const std::string& route) {
        return zeta_second_deriv(delta, a, t,
                                 route == "finite_difference" ? ZetaRoute::FiniteDifference : ZetaRoute::FinitePart);
      },
      py::arg("delta"), py::arg("a"), py::arg("t"), py::arg("route") = "finite_part");

  m.def(
      "verify",
      [](const std::string& case_json, std::uint64_t seed) {
        const IbpfCase c = case_from_json(parse_json_text(case_json, "case"), "case");
        return report_to_json(verify(c, seed, 1)).dump();
      },
      py::arg("case_json"), py::arg("seed") = 0, "run one case; returns the report as JSON text",
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "sample_bridge",
      [](double delta, double a, double ap, int points, int n, std::uint64_t seed) {
        const BridgeSampler s(delta, a, ap, GridMesh(points));
        std::vector<std::vector<double>> paths;
        for (int i = 0; i < n; ++i) {
          RngStream rng(seed, static_cast<std::uint64_t>(i));
          paths.push_back(s.sample(rng).values());
        }
        return paths;
      },
      py::arg("delta"), py::arg("a"), py::arg("a_prime"), py::arg("points"), py::arg("n"), py::arg("seed") = 0);
}
