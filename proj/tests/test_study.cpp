#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "support.hpp"

#include "sdefw/study.hpp"

using namespace sdefw;

namespace {

std::string usage_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::usage) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "no error raised";
  return {};
}

std::string shipped_config(const std::string& name) { return std::string(SDEFW_SOURCE_DIR) + "/configs/" + name; }

}  // namespace

TEST(Config, ParsesKeysAndComments) {
  const auto c = StudyConfig::parse(
      "# header\n"
      "mode = qmc\n"
      "model = heston   # trailing comment\n"
      "K = 1.1\n"
      "schemes = 1;1,2;GF(1,2,3)\n"
      "n = 2,3\n"
      "M = 1e6\n"
      "reference = 0.06\n");
  EXPECT_EQ(c.mode, StudyMode::qmc);
  EXPECT_EQ(c.model, "heston");
  EXPECT_EQ(c.model_params.at("K"), 1.1);
  EXPECT_EQ(c.schemes, (std::vector<std::vector<int>>{{1}, {1, 2}, {1, 2, 3}}));
  EXPECT_EQ(c.n_values, (std::vector<int>{2, 3}));
  EXPECT_EQ(c.M, 1000000u);
  EXPECT_EQ(c.reference, 0.06);
}

TEST(Config, RoundTrip) {
  for (const char* name : {"heston_qmc.cfg", "heston_mc.cfg", "gbm_oracle.cfg", "ou_oracle.cfg", "algebra.cfg"}) {
    const auto c = StudyConfig::load(shipped_config(name));
    const auto again = StudyConfig::parse(c.serialize());
    EXPECT_EQ(again, c) << name;
    EXPECT_EQ(again.serialize(), c.serialize()) << name;
  }
  StudyConfig c;
  c.set("reference=none");
  EXPECT_EQ(StudyConfig::parse(c.serialize()), c);
}

TEST(Config, UsageErrorsNameTheKey) {
  EXPECT_NE(usage_message([] { StudyConfig::parse("colour = blue\n"); }).find("colour"), std::string::npos);
  EXPECT_NE(usage_message([] { StudyConfig::parse("M = lots\n"); }).find("M"), std::string::npos);
  EXPECT_NE(usage_message([] { StudyConfig::parse("schemes = 1,1\n"); }).find("schemes"), std::string::npos);
  EXPECT_NE(usage_message([] { StudyConfig::parse("mode = fast\n"); }).find("mode"), std::string::npos);
  EXPECT_NE(usage_message([] { StudyConfig::parse("n = 4,2\n").validate(); }).find("n"), std::string::npos);
  EXPECT_NE(usage_message([] { StudyConfig::parse("model = gbm\nalpha = 2\n").validate(); }).find("alpha"),
            std::string::npos);
  EXPECT_NE(usage_message([] {
              StudyConfig::parse("mode = quadrature-oracle\nmodel = ou\nschemes = 1,2\nn = 2,8\n").validate();
            }).find("n"),
            std::string::npos);
  EXPECT_NE(usage_message([] { StudyConfig::parse("mode = qmc\nrng = pseudo:3\n").validate(); }).find("rng"),
            std::string::npos);
  EXPECT_ERROR_KIND(StudyConfig::load("/nonexistent/study.cfg"), ErrorKind::io);
}

TEST(Config, Overrides) {
  auto c = StudyConfig::load(shipped_config("heston_qmc.cfg"));
  c.set("M=4096");
  c.set(" n = 2 ");
  c.set("beta=0.2");
  EXPECT_EQ(c.M, 4096u);
  EXPECT_EQ(c.n_values, std::vector<int>{2});
  EXPECT_EQ(c.model_params.at("beta"), 0.2);
  EXPECT_ERROR_KIND(c.set("no-equals-sign"), ErrorKind::usage);
}

TEST(Study, QuadratureOracleOnOu) {
  auto c = StudyConfig::load(shipped_config("ou_oracle.cfg"));
  c.set("schemes=1");
  const auto r = run_study(c);
  ASSERT_EQ(r.slopes.size(), 1u);
  EXPECT_EQ(r.slopes[0].scheme, "NV");
  EXPECT_NEAR(r.slopes[0].slope, -2.0, 0.5);
  EXPECT_EQ(r.rows.size(), 6u);
  EXPECT_TRUE(r.all_pass());
  EXPECT_NE(r.csv().find("ou,NV,1,,gauss-hermite:16,"), std::string::npos) << r.csv();
}

TEST(Study, CsvIsReproducibleWithoutTiming) {
  auto c = StudyConfig::load(shipped_config("heston_mc.cfg"));
  c.set("M=2000");
  c.set("n=2,3");
  const auto a = run_study(c, 1);
  const auto b = run_study(c, 2);
  EXPECT_EQ(a.csv_without_timing(), b.csv_without_timing());
  EXPECT_EQ(a.rows.size(), 2u * (1 + 1 + 1 + 3));
  for (const auto& row : a.rows) {
    ASSERT_TRUE(row.abs_error.has_value());
    EXPECT_EQ(*row.abs_error, std::fabs(row.E - 6.0473534496e-2));
  }
}

TEST(Study, MissingReferenceIsAnError) {
  auto c = StudyConfig::parse("mode = mc\nmodel = heston\nM = 10\nn = 1\n");
  EXPECT_THROW(run_study(c), Error);
  c.set("reference=none");
  const auto r = run_study(c);
  EXPECT_TRUE(r.slopes.empty());
  EXPECT_FALSE(r.rows.front().abs_error.has_value());
}

TEST(Study, SinglePartitionCountWarns) {
  auto c = StudyConfig::load(shipped_config("ou_oracle.cfg"));
  c.set("n=2");
  const auto r = run_study(c);
  EXPECT_TRUE(r.slopes.empty());
  EXPECT_EQ(r.warnings.size(), 2u);
  EXPECT_NE(r.summary().find("WARNING scheme NV"), std::string::npos);
}

TEST(Study, AlgebraMode) {
  const auto r = run_study(StudyConfig::load(shipped_config("algebra.cfg")));
  ASSERT_TRUE(r.verification.has_value());
  EXPECT_TRUE(r.all_pass());
  EXPECT_NE(r.summary().find("RESULT PASS"), std::string::npos);
  EXPECT_EQ(r.summary().find("FAIL"), std::string::npos);
}

TEST(PlotData, SyntheticPowerLaw) {
  std::vector<PlotPoint> table;
  for (int n : {2, 4, 8, 16}) table.push_back({"NV", n, 0.3 / (n * n)});
  const auto p = emit_plotdata(table);
  EXPECT_TRUE(p.warnings.empty());
  EXPECT_NE(p.text.find("# scheme NV slope -2.00"), std::string::npos) << p.text;
  EXPECT_NE(p.text.find("0.301030 -1.124939"), std::string::npos) << p.text;
}

TEST(PlotData, TwoPointsGiveTwoRows) {
  const auto p = emit_plotdata({{"GF(1,2)", 2, 1e-3}, {"GF(1,2)", 4, 6.25e-5}});
  EXPECT_NE(p.text.find("slope -4.00"), std::string::npos);
  EXPECT_EQ(std::count(p.text.begin(), p.text.end(), '\n'), 1 + 1 + 2 + 1);
}

TEST(PlotData, TooFewPointsAreSkipped) {
  const auto p = emit_plotdata({{"NV", 2, 1e-3}, {"GF(1,2)", 2, 1e-4}, {"GF(1,2)", 4, 0.0}});
  EXPECT_TRUE(p.text.empty());
  EXPECT_EQ(p.warnings.size(), 2u);
}
