#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <string>

#include "sdefw/sdefw.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  sdefw_string_free(s);
  return out;
}

}  // namespace

TEST(CApi, VersionAndStatusNames) {
  EXPECT_GT(std::strlen(sdefw_version()), 0u);
  EXPECT_STREQ(sdefw_status_name(SDEFW_OK), "ok");
  EXPECT_STREQ(sdefw_status_name(SDEFW_E_SINGULAR), "singular");
  EXPECT_STREQ(sdefw_status_name(static_cast<sdefw_status>(99)), "unknown");
}

TEST(CApi, SchemeWeights) {
  const int thetas[] = {1, 2, 3};
  sdefw_scheme* s = nullptr;
  ASSERT_EQ(sdefw_scheme_create(thetas, 3, &s), SDEFW_OK);
  EXPECT_EQ(sdefw_scheme_levels(s), 3u);
  double w[3];
  ASSERT_EQ(sdefw_scheme_weights(s, w, 3), SDEFW_OK);
  EXPECT_DOUBLE_EQ(w[0], 1.0 / 24);
  EXPECT_DOUBLE_EQ(w[1], -16.0 / 15);
  EXPECT_DOUBLE_EQ(w[2], 81.0 / 40);
  char* text = nullptr;
  ASSERT_EQ(sdefw_scheme_weight_fraction(s, 1, &text), SDEFW_OK);
  EXPECT_EQ(take(text), "-16/15");
  EXPECT_EQ(sdefw_scheme_weight_fraction(s, 3, &text), SDEFW_E_PARAMETER);
  EXPECT_EQ(sdefw_scheme_weights(s, w, 2), SDEFW_E_PARAMETER);
  double cost = 0;
  ASSERT_EQ(sdefw_cost_estimate(s, 2, 10, 2, 1, 1, 1, &cost), SDEFW_OK);
  EXPECT_EQ(cost, 10 * (15 + 2 * 5 * 6 + 2 + 1) + 6);
  sdefw_scheme_free(s);
}

TEST(CApi, ErrorsAreReported) {
  const int repeated[] = {1, 1};
  sdefw_scheme* s = nullptr;
  EXPECT_EQ(sdefw_scheme_create(repeated, 2, &s), SDEFW_E_SINGULAR);
  EXPECT_EQ(s, nullptr);
  EXPECT_GT(std::strlen(sdefw_last_error()), 0u);
  EXPECT_EQ(sdefw_scheme_create(nullptr, 2, &s), SDEFW_E_PARAMETER);
  sdefw_config* c = nullptr;
  EXPECT_EQ(sdefw_config_parse("colour = blue\n", &c), SDEFW_E_USAGE);
  EXPECT_NE(std::string(sdefw_last_error()).find("colour"), std::string::npos);
  EXPECT_EQ(sdefw_config_load("/nonexistent.cfg", &c), SDEFW_E_IO);
  sdefw_model* m = nullptr;
  const char* keys[] = {"kappa"};
  const double values[] = {1.0};
  EXPECT_EQ(sdefw_model_create("heston", keys, values, 1, &m), SDEFW_E_PARAMETER);
  const int ok_theta[] = {1};
  ASSERT_EQ(sdefw_scheme_create(ok_theta, 1, &s), SDEFW_OK);
  sdefw_scheme_free(s);
}

TEST(CApi, EstimateIsDeterministic) {
  sdefw_model* m = nullptr;
  const char* keys[] = {"mu", "power"};
  const double values[] = {0.0, 1.0};
  ASSERT_EQ(sdefw_model_create("gbm", keys, values, 2, &m), SDEFW_OK);
  const int thetas[] = {1, 2};
  sdefw_scheme* s = nullptr;
  ASSERT_EQ(sdefw_scheme_create(thetas, 2, &s), SDEFW_OK);
  double e1 = 0, se1 = 0, e2 = 0, se2 = 0;
  ASSERT_EQ(sdefw_estimate(m, s, 2, 20000, "pseudo:5", 1, &e1, &se1), SDEFW_OK);
  ASSERT_EQ(sdefw_estimate(m, s, 2, 20000, "pseudo:5", 2, &e2, &se2), SDEFW_OK);
  EXPECT_EQ(e1, e2);
  EXPECT_EQ(se1, se2);
  EXPECT_LT(std::fabs(e1 - 1.0), 4 * se1);
  EXPECT_EQ(sdefw_estimate(m, s, 2, 0, "pseudo:5", 1, &e1, &se1), SDEFW_E_PARAMETER);
  sdefw_scheme_free(s);
  sdefw_model_free(m);
}

TEST(CApi, StudyRoundTrip) {
  sdefw_config* c = nullptr;
  ASSERT_EQ(sdefw_config_parse("mode = quadrature-oracle\nmodel = ou\nschemes = 1\nn = 1,2\n", &c), SDEFW_OK);
  ASSERT_EQ(sdefw_config_set(c, "output=table.csv"), SDEFW_OK);
  EXPECT_EQ(sdefw_config_set(c, "bogus=1"), SDEFW_E_USAGE);
  char* text = nullptr;
  ASSERT_EQ(sdefw_config_output(c, &text), SDEFW_OK);
  EXPECT_EQ(take(text), "table.csv");
  ASSERT_EQ(sdefw_config_serialize(c, &text), SDEFW_OK);
  const std::string serialized = take(text);
  sdefw_config* again = nullptr;
  ASSERT_EQ(sdefw_config_parse(serialized.c_str(), &again), SDEFW_OK);
  ASSERT_EQ(sdefw_config_serialize(again, &text), SDEFW_OK);
  EXPECT_EQ(take(text), serialized);
  sdefw_config_free(again);

  sdefw_study* study = nullptr;
  ASSERT_EQ(sdefw_run_study(c, 1, &study), SDEFW_OK);
  EXPECT_EQ(sdefw_study_all_pass(study), 1);
  ASSERT_EQ(sdefw_study_csv(study, &text), SDEFW_OK);
  const std::string csv = take(text);
  EXPECT_EQ(csv.rfind("model,scheme,n,M,rng,E,stderr,elapsed_s,op_count,abs_error\n", 0), 0u);
  ASSERT_EQ(sdefw_study_summary(study, &text), SDEFW_OK);
  EXPECT_NE(take(text).find("SLOPE NV"), std::string::npos);
  char* warnings = nullptr;
  ASSERT_EQ(sdefw_study_plotdata(study, &text, &warnings), SDEFW_OK);
  EXPECT_NE(take(text).find("log10_n log10_error"), std::string::npos);
  EXPECT_EQ(take(warnings), "");
  sdefw_study_free(study);
  sdefw_config_free(c);
}

TEST(CApi, VerifyAlgebra) {
  char* report = nullptr;
  int pass = 0;
  ASSERT_EQ(sdefw_verify_algebra(2, 1, 0, &report, &pass), SDEFW_OK);
  EXPECT_EQ(pass, 1);
  EXPECT_NE(take(report).find("CHECK order_condition d=1 D=4 m=2 -> PASS"), std::string::npos);
  EXPECT_EQ(sdefw_verify_algebra(0, 1, 0, &report, &pass), SDEFW_E_PARAMETER);
}
