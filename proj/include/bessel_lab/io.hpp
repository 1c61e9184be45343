#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bessel_lab/core_model.hpp"
#include "bessel_lab/ibpf_engine.hpp"
#include "bessel_lab/spde_sim.hpp"

namespace bessel_lab {

using json = nlohmann::json;

// All readers throw ParseError naming the offending field, e.g. "cases[2].delta".
FiniteMeasure measure_from_json(const json& j, const std::string& where = "m");
json measure_to_json(const FiniteMeasure& m);
ExpFunctional functional_from_json(const json& j, const std::string& where = "phi");
TestFunctionC2c test_fn_from_json(const json& j, const std::string& where = "h");
json test_fn_to_json(const TestFunctionC2c& h);
IbpfCase case_from_json(const json& j, const std::string& where = "case");

struct SpdeSettings {
  DecompositionConfig cfg;
  int replicas = 200;
  double theta = 0.2;  // h = bump(theta)
};

struct SuiteConfig {
  std::vector<IbpfCase> cases;
  std::uint64_t seed = 0;
  std::optional<long> mc;     // overrides mc_paths of every case
  std::optional<double> tol;  // overrides tol of every case
  int jobs = 0;               // 0: fall back to BESSEL_LAB_JOBS
  std::string out;
  std::optional<SpdeSettings> spde;
};

// Syntax errors report line and column.
json parse_json_text(const std::string& text, const std::string& source);
SuiteConfig suite_from_json(const json& j);
SuiteConfig load_suite(const std::string& path);
SpdeSettings spde_from_json(const json& j, const std::string& where = "spde");

json report_to_json(const VerifyReport& r);
json spde_summary_to_json(const SpdeDiagnostics& d, const SpdeSettings& s);

// CSV with a fixed header; numbers in shortest round-trip form.
std::string format_number(double x);
void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);
void write_path_csv(std::ostream& os, const Path& p);

}  // namespace bessel_lab
