#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <optional>

#include "sdefw/error.hpp"
#include "sdefw/ode_flows.hpp"

namespace testing_support {

/// Kind of the sdefw::Error thrown by f, or nullopt when nothing was thrown.
template <typename F>
std::optional<sdefw::ErrorKind> error_kind(F&& f) {
  try {
    f();
  } catch (const sdefw::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

inline sdefw::VectorField linear_field(double lambda = 1.0) {
  return [lambda](std::span<const double> x, std::span<double> out) { out[0] = lambda * x[0]; };
}

inline sdefw::ReferenceFlow linear_flow(double lambda = 1.0) {
  return [lambda](double t, const sdefw::State& x) { return sdefw::State{x[0] * std::exp(lambda * t)}; };
}

inline sdefw::VectorField cosine_field() {
  return [](std::span<const double> x, std::span<double> out) { out[0] = std::cos(x[0]); };
}

/// x' = cos x is solved by the Gudermannian: x(t) = gd(t + gd^{-1}(x0)).
inline sdefw::ReferenceFlow cosine_flow() {
  return [](double t, const sdefw::State& x) {
    const double c = 2 * std::atanh(std::tan(x[0] / 2));
    return sdefw::State{2 * std::atan(std::tanh((t + c) / 2))};
  };
}

/// Smallest horizon in {1, 2, 4, 8} leaving at least three usable points.
inline sdefw::OrderEstimate order_on_first_resolvable_horizon(const sdefw::ButcherTableau& tableau,
                                                              const sdefw::VectorField& field,
                                                              const sdefw::ReferenceFlow& exact,
                                                              const sdefw::State& x0, double* horizon = nullptr) {
  for (double T : {1.0, 2.0, 4.0}) {
    try {
      auto e = sdefw::estimate_order(tableau, field, exact, x0, T);
      if (horizon) *horizon = T;
      return e;
    } catch (const sdefw::Error& e) {
      if (e.kind() != sdefw::ErrorKind::inconclusive) throw;
    }
  }
  if (horizon) *horizon = 8.0;
  return sdefw::estimate_order(tableau, field, exact, x0, 8.0);
}

}  // namespace testing_support

#define EXPECT_ERROR_KIND(expr, kind) \
  EXPECT_EQ(testing_support::error_kind([&] { (void)(expr); }), std::optional<sdefw::ErrorKind>(kind))
