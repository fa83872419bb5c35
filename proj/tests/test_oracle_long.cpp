#include <gtest/gtest.h>

#include <cmath>

#include "sdefw/scheme_engine.hpp"

using namespace sdefw;

// theta_max * n = 8 saturates the oracle; a few minutes on one core.
TEST(QuadratureLong, TwoLevelOrderFourOnOuFinerGrid) {
  const auto m = ou_model({});
  const auto gf = solve_weights({1, 2});
  const double e2 = std::fabs(quadrature_expectation(m, gf, 2).extrapolated - *m.exact_expectation);
  const double e4 = std::fabs(quadrature_expectation(m, gf, 4).extrapolated - *m.exact_expectation);
  EXPECT_NEAR(std::log2(e2 / e4), 4.0, 0.8) << e2 << " " << e4;
}
