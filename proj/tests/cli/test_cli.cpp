#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(BESSEL_LAB_EXE) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
  const int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bessel_lab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return (dir_ / name).string();
  }
  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, EmptySuitePasses) {
  const auto cfg = write("empty.json", R"({"cases": []})");
  const auto r = run("ibpf-check --config " + cfg);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "[]\n");
}

TEST_F(Cli, CorruptedJsonIsParseError) {
  const auto cfg = write("bad.json", R"({"cases": [ {"id": "x", )");
  EXPECT_EQ(run("ibpf-check --config " + cfg).code, 2);
  EXPECT_EQ(run("run-suite --config " + cfg).code, 2);
}

TEST_F(Cli, MissingFieldIsParseError) {
  const auto cfg = write("bad.json", R"({"cases": [{"id": "x"}]})");
  EXPECT_EQ(run("ibpf-check --config " + cfg).code, 2);
}

TEST_F(Cli, UnknownFlagIsParseError) { EXPECT_EQ(run("density --delta 2 --bogus 1").code, 2); }

TEST_F(Cli, Delta3CasePasses) {
  const auto cfg = write("d3.json", R"({"cases": [{"id": "d3", "delta": 3, "a": 0, "a_prime": 0}]})");
  const auto out = (dir_ / "out").string();
  EXPECT_EQ(run("ibpf-check --config " + cfg + " --out " + out).code, 0);
  const std::string csv = slurp(fs::path(out) / "summary.csv");
  EXPECT_EQ(csv.rfind("case_id,branch,lhs_analytic,rhs,rel_err,lhs_mc,stderr,pass\n", 0), 0u);
  EXPECT_NE(csv.find("d3,delta3,"), std::string::npos);
}

TEST_F(Cli, FailingToleranceExitsOne) {
  const auto cfg = write("tight.json", R"({"cases": [{"id": "g", "delta": 2.5, "a": 1, "a_prime": 0.5,
                                            "m": {"atoms": [{"t": 0.6, "w": 1}]}, "tol": 1e-300}]})");
  EXPECT_EQ(run("ibpf-check --config " + cfg).code, 1);
}

TEST_F(Cli, ReportsAreByteIdentical) {
  const auto cfg = write("mc.json", R"({"seed": 5, "cases": [
      {"id": "b1", "delta": 1.5, "a": 1, "a_prime": 2, "m": {"atoms": [{"t": 0.6, "w": 1}]},
       "mc_paths": 2000, "mesh_points": 65}]})");
  const auto a = (dir_ / "a").string(), b = (dir_ / "b").string();
  run("run-suite --config " + cfg + " --out " + a + " --jobs 1");
  run("run-suite --config " + cfg + " --out " + b + " --jobs 2");
  const std::string ra = slurp(fs::path(a) / "report.json");
  EXPECT_FALSE(ra.empty());
  EXPECT_EQ(ra, slurp(fs::path(b) / "report.json"));
  EXPECT_EQ(slurp(fs::path(a) / "summary.csv"), slurp(fs::path(b) / "summary.csv"));
  const auto c = run("run-suite --config " + cfg + " --seed 6");
  EXPECT_NE(c.out, ra);
}

TEST_F(Cli, DensityCsv) {
  const auto r = run("density --delta 3 --r 0.5 --a 0 --ap 0 --bmax 1 --points 3");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("b,p\n0,0\n0.5,", 0), 0u) << r.out;
}

TEST_F(Cli, MuAndSolve) {
  const auto mu = run("mu --alpha -1.5 --fn exp --lambda 2");
  EXPECT_EQ(mu.code, 0);
  EXPECT_NE(mu.out.find("-1.5,2.828427"), std::string::npos) << mu.out;
  const auto sl = run(R"(sl-solve --measure '{"atoms": [{"t": 0.5, "w": 1}]}' --points 3)");
  EXPECT_EQ(sl.code, 0);
  EXPECT_NE(sl.out.find("0.5,0.5,"), std::string::npos) << sl.out;
}

TEST_F(Cli, SigmaAndSample) {
  EXPECT_EQ(run("sigma --delta 2.5 --a 1 --ap 0.5 --r 0.4 --points 5").code, 0);
  const auto s = run("sample --delta 1.5 --a 1 --ap 2 --n 2 --points 5 --seed 3");
  EXPECT_EQ(s.code, 0);
  EXPECT_EQ(s.out.rfind("r,path0,path1\n0,1,1\n", 0), 0u) << s.out;
}

TEST_F(Cli, SpdeSimWritesSeries) {
  const auto out = (dir_ / "spde").string();
  EXPECT_EQ(run("spde-sim --K 16 --dt 1e-4 --T 0.002 --record-every 2 --mesh-points 65 --replicas 3 --seed 1 --out " + out).code, 0);
  EXPECT_TRUE(fs::exists(fs::path(out) / "summary.json"));
  EXPECT_TRUE(fs::exists(fs::path(out) / "replica_2.csv"));
  EXPECT_EQ(run("spde-sim --eps 0.01 --eta 0.02").code, 2);
}
