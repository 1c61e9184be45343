#pragma once

#include <string>

#include "bessel_lab/io.hpp"

namespace bessel_lab::cli {

enum ExitCode { kPass = 0, kPartialFailure = 1, kParseError = 2 };

struct SuiteOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<long> mc;
  std::optional<double> tol;
  std::optional<int> jobs;
  std::optional<std::string> out;
};

int resolve_jobs(std::optional<int> flag, int config);

// Runs every case (and the SPDE block if present), writes report.json and summary.csv
// into the output directory (stdout if none) and returns the exit code.
int run_suite(SuiteConfig cfg, const SuiteOverrides& ov);

// ibpf-check: cases only, report array on stdout unless --out is given.
int run_ibpf_check(SuiteConfig cfg, const SuiteOverrides& ov);

}  // namespace bessel_lab::cli
