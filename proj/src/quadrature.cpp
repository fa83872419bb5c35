#include "sdefw/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "sdefw/error.hpp"

namespace sdefw {

namespace {

// Newton iteration on the orthonormal physicists' Hermite recurrence, with
// the usual asymptotic starting guesses. Produces nodes/weights for
// weight exp(-x^2), then rescales to the standard normal.
GaussHermiteRule compute_rule(int n) {
  constexpr int max_iter = 100;
  const long double pim4 = 1.0L / std::pow(std::numbers::pi_v<long double>, 0.25L);
  std::vector<long double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  long double z = 0;
  for (int i = 0; i < half; ++i) {
    if (i == 0) {
      z = std::sqrt(static_cast<long double>(2 * n + 1)) -
          1.85575L * std::pow(static_cast<long double>(2 * n + 1), -0.16667L);
    } else if (i == 1) {
      z -= 1.14L * std::pow(static_cast<long double>(n), 0.426L) / z;
    } else if (i == 2) {
      z = 1.86L * z - 0.86L * x[0];
    } else if (i == 3) {
      z = 1.91L * z - 0.91L * x[1];
    } else {
      z = 2.0L * z - x[static_cast<std::size_t>(i - 2)];
    }
    long double pp = 0;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
      long double p1 = pim4, p2 = 0;
      for (int j = 0; j < n; ++j) {
        const long double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0L / (j + 1)) * p2 - std::sqrt(static_cast<long double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0L * n) * p2;
      const long double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= 1e-18L * std::max(1.0L, std::fabs(z))) break;
    }
    if (iter == max_iter) fail(ErrorKind::numeric_failure, "Gauss-Hermite node iteration did not converge");
    x[static_cast<std::size_t>(i)] = z;
    x[static_cast<std::size_t>(n - 1 - i)] = -z;
    w[static_cast<std::size_t>(i)] = 2.0L / (pp * pp);
    w[static_cast<std::size_t>(n - 1 - i)] = w[static_cast<std::size_t>(i)];
  }
  GaussHermiteRule rule;
  const long double inv_sqrt_pi = 1.0L / std::sqrt(std::numbers::pi_v<long double>);
  for (int i = n - 1; i >= 0; --i) {
    rule.nodes.push_back(static_cast<double>(std::sqrt(2.0L) * x[static_cast<std::size_t>(i)]));
    rule.weights.push_back(static_cast<double>(w[static_cast<std::size_t>(i)] * inv_sqrt_pi));
  }
  return rule;
}

}  // namespace

GaussHermiteRule gauss_hermite(int points) {
  if (points < 1 || points > 256) fail(ErrorKind::parameter, "Gauss-Hermite rule supports 1..256 points");
  static std::mutex mutex;
  static std::map<int, GaussHermiteRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(points);
  if (it == cache.end()) it = cache.emplace(points, compute_rule(points)).first;
  return it->second;
}

}  // namespace sdefw
