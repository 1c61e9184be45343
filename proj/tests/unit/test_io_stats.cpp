#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "bessel_lab/errors.hpp"
#include "bessel_lab/io.hpp"
#include "bessel_lab/stats.hpp"

using namespace bessel_lab;

namespace {

std::string parse_error_of(const std::string& text) {
  try {
    suite_from_json(parse_json_text(text, "cfg.json"));
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Io, MeasureRoundTrip) {
  const FiniteMeasure m({{0.25, 0.5}}, {{0.1, 0.6, {1.0, 2.0}}});
  const auto back = measure_from_json(measure_to_json(m));
  ASSERT_EQ(back.atoms().size(), 1u);
  EXPECT_EQ(back.atoms()[0].t, 0.25);
  EXPECT_EQ(back.pieces()[0].coeffs, (std::vector<double>{1.0, 2.0}));
}

TEST(Io, CaseDefaults) {
  const auto c = case_from_json(json::parse(R"({"id": "x", "delta": 2.5, "a": 1, "a_prime": 0.5})"));
  EXPECT_EQ(c.id, "x");
  EXPECT_EQ(c.spec.delta, 2.5);
  EXPECT_EQ(c.mode, IbpfMode::Bridge);
  EXPECT_EQ(c.mesh_points, 513);
  EXPECT_EQ(c.h.theta(), 0.2);
}

TEST(Io, SyntaxErrorHasPosition) {
  const std::string e = parse_error_of("{\n  \"cases\": [\n  ,]\n}");
  EXPECT_NE(e.find("cfg.json:3:"), std::string::npos) << e;
}

TEST(Io, FieldErrorsNamePath) {
  EXPECT_NE(parse_error_of(R"({"cases": [{"id": "a", "delta": "x"}]})").find("cases[0].delta"), std::string::npos);
  EXPECT_NE(parse_error_of(R"({"cases": [{"id": "a", "delta": -1}]})").find("cases[0]"), std::string::npos);
  EXPECT_NE(parse_error_of(R"({"cases": [{"id": "a", "delta": 2}, {"id": "a", "delta": 3}]})").find("duplicate"),
            std::string::npos);
  EXPECT_NE(parse_error_of(R"({"cases": [{"id": "a", "delta": 2, "tol": 0}]})"), "");
}

TEST(Io, EmptySuite) {
  const auto cfg = suite_from_json(json::parse(R"({"cases": []})"));
  EXPECT_TRUE(cfg.cases.empty());
  EXPECT_FALSE(cfg.spde.has_value());
}

TEST(Io, NumbersRoundTrip) {
  for (double x : {0.1, 1.0 / 3, -2.5e-17, 12345.0}) EXPECT_EQ(std::stod(format_number(x)), x);
  std::ostringstream os;
  write_csv(os, {"a", "b"}, {{1, 2}, {3, 4}});
  EXPECT_EQ(os.str(), "a,b\n1,3\n2,4\n");
}

TEST(Stats, KolmogorovTail) {
  EXPECT_NEAR(kolmogorov_q(1.36), 0.0494, 1e-3);
  EXPECT_EQ(kolmogorov_q(0.0), 1.0);
}

TEST(Stats, Ols) {
  std::vector<double> x{0, 1, 2, 3, 4}, y;
  for (double v : x) y.push_back(1 + 2 * v);
  const auto r = ols({x}, y);
  EXPECT_NEAR(r.coef[0], 1.0, 1e-12);
  EXPECT_NEAR(r.coef[1], 2.0, 1e-12);
}

TEST(Stats, TwoSampleIdentical) {
  std::vector<double> x{0.1, 0.5, 0.7};
  EXPECT_EQ(ks_two_sample(x, x).statistic, 0.0);
}
