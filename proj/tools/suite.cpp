#include "suite.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "bessel_lab/samplers.hpp"

namespace bessel_lab::cli {
namespace {

struct CaseOutcome {
  VerifyReport report;
  std::string error;
};

std::uint64_t case_seed(std::uint64_t seed, std::size_t i) {
  return seed ^ (0x9E3779B97F4A7C15ULL * (i + 1));
}

std::vector<CaseOutcome> run_cases(const std::vector<IbpfCase>& cases, std::uint64_t seed, int jobs) {
  std::vector<CaseOutcome> out(cases.size());
  std::atomic<std::size_t> next{0};
  const int outer = std::max(1, std::min<int>(jobs, static_cast<int>(cases.size())));
  // spare threads go to the Monte Carlo of each case
  const int inner = std::max(1, jobs / outer);
  auto work = [&]() {
    for (std::size_t i; (i = next.fetch_add(1)) < cases.size();) {
      try {
        out[i].report = verify(cases[i], case_seed(seed, i), inner);
      } catch (const std::exception& e) {
        out[i].report.case_id = cases[i].id;
        out[i].report.branch = ibpf_branch(cases[i].spec.delta);
        out[i].report.pass = false;
        out[i].error = e.what();
      }
    }
  };
  if (outer == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < outer; ++j) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return out;
}

void apply(SuiteConfig& cfg, const SuiteOverrides& ov) {
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.mc) cfg.mc = *ov.mc;
  if (ov.tol) cfg.tol = *ov.tol;
  if (ov.out) cfg.out = *ov.out;
  for (auto& c : cfg.cases) {
    if (cfg.mc) c.mc_paths = *cfg.mc;
    if (cfg.tol) c.tol = *cfg.tol;
  }
}

json report_array(const std::vector<CaseOutcome>& res) {
  json arr = json::array();
  for (const auto& r : res) {
    json j = report_to_json(r.report);
    if (!r.error.empty()) {
      j["error"] = r.error;
      for (const char* k : {"lhs_analytic", "rhs", "rhs_unified", "abs_err", "rel_err"}) j[k] = nullptr;
    }
    arr.push_back(std::move(j));
  }
  return arr;
}

void write_summary_csv(std::ostream& os, const std::vector<CaseOutcome>& res) {
  os << "case_id,branch,lhs_analytic,rhs,rel_err,lhs_mc,stderr,pass\n";
  for (const auto& r : res) {
    const auto& v = r.report;
    const bool ok = r.error.empty();
    os << v.case_id << "," << v.branch << "," << (ok ? format_number(v.lhs_analytic) : "") << ","
       << (ok ? format_number(v.rhs) : "") << "," << (ok ? format_number(v.rel_err) : "") << ","
       << (ok && v.mc_run ? format_number(v.lhs_mc) : "") << ","
       << (ok && v.mc_run ? format_number(v.mc_stderr) : "") << "," << (v.pass ? 1 : 0) << "\n";
  }
}

bool all_pass(const std::vector<CaseOutcome>& res) {
  for (const auto& r : res) {
    if (!r.report.pass) return false;
  }
  return true;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

}  // namespace

int resolve_jobs(std::optional<int> flag, int config) {
  if (flag && *flag > 0) return *flag;
  if (config > 0) return config;
  return default_jobs();
}

int run_ibpf_check(SuiteConfig cfg, const SuiteOverrides& ov) {
  apply(cfg, ov);
  const int jobs = resolve_jobs(ov.jobs, cfg.jobs);
  const auto res = run_cases(cfg.cases, cfg.seed, jobs);
  const std::string report = report_array(res).dump(2) + "\n";
  if (cfg.out.empty()) {
    std::cout << report;
  } else {
    std::filesystem::create_directories(cfg.out);
    write_file(std::filesystem::path(cfg.out) / "report.json", report);
    std::ostringstream csv;
    write_summary_csv(csv, res);
    write_file(std::filesystem::path(cfg.out) / "summary.csv", csv.str());
  }
  for (const auto& r : res) {
    if (!r.error.empty()) std::cerr << "case " << r.report.case_id << ": " << r.error << "\n";
  }
  return all_pass(res) ? kPass : kPartialFailure;
}

int run_suite(SuiteConfig cfg, const SuiteOverrides& ov) {
  apply(cfg, ov);
  const int jobs = resolve_jobs(ov.jobs, cfg.jobs);
  const auto res = run_cases(cfg.cases, cfg.seed, jobs);
  bool ok = all_pass(res);

  json report;
  report["cases"] = report_array(res);
  std::ostringstream spde_csv;
  if (cfg.spde) {
    const SpdeSettings& s = *cfg.spde;
    const auto h = TestFunctionC2c::bump(s.theta);
    try {
      const SpdeDiagnostics d = spde_diagnostics(h, s.cfg, s.replicas, cfg.seed, jobs);
      report["spde"] = spde_summary_to_json(d, s);
      spde_csv << "replica,t,uh,n,m\n";
      for (std::size_t i = 0; i < d.series.size(); ++i) {
        const auto& x = d.series[i];
        for (std::size_t k = 0; k < x.t.size(); ++k) {
          spde_csv << i << "," << format_number(x.t[k]) << "," << format_number(x.uh[k]) << ","
                   << format_number(x.n[k]) << "," << format_number(x.m[k]) << "\n";
        }
      }
    } catch (const std::exception& e) {
      report["spde"] = {{"error", e.what()}};
      ok = false;
    }
  }
  report["pass"] = ok;

  const std::string text = report.dump(2) + "\n";
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    const std::filesystem::path dir(cfg.out);
    std::filesystem::create_directories(dir);
    write_file(dir / "report.json", text);
    std::ostringstream csv;
    write_summary_csv(csv, res);
    write_file(dir / "summary.csv", csv.str());
    if (cfg.spde) write_file(dir / "spde_series.csv", spde_csv.str());
  }
  for (const auto& r : res) {
    if (!r.error.empty()) std::cerr << "case " << r.report.case_id << ": " << r.error << "\n";
  }
  return ok ? kPass : kPartialFailure;
}

}  // namespace bessel_lab::cli
