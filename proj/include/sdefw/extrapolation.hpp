#pragma once

// Generalized Fujiwara extrapolation weights f = A^{-1} e_1, where row l of A
// holds 1/theta_i^{2l}.

#include <string>
#include <vector>

#include "sdefw/free_algebra.hpp"

namespace sdefw {

using algebra::Rational;

class SchemeSpec {
 public:
  int m() const noexcept { return static_cast<int>(thetas_.size()); }
  int weak_order() const noexcept { return 2 * m(); }
  const std::vector<int>& thetas() const noexcept { return thetas_; }
  const std::vector<Rational>& weights() const noexcept { return weights_; }
  std::vector<double> weights_as_double() const;
  int theta_max() const noexcept { return thetas_.back(); }
  int theta_sum() const noexcept;

  /// "NV" for the single-level scheme, otherwise "GF(1,2,3)".
  std::string label() const;
  /// Sum of |f_i|; grows with m. Informational only.
  double weight_magnitude() const;

  /// Exact check of A f = e_1.
  bool satisfies_moment_conditions() const;

 private:
  friend SchemeSpec solve_weights(const std::vector<int>& thetas);
  std::vector<int> thetas_;
  std::vector<Rational> weights_;
};

/// Exact Gaussian elimination over the rationals. thetas must be strictly
/// increasing positive integers; a repeated value makes A singular.
SchemeSpec solve_weights(const std::vector<int>& thetas);

/// The displayed three-level formula, f_i = prod_{j != i} theta_i^2 / (theta_i^2 - theta_j^2).
std::vector<Rational> closed_form_m3(int theta1, int theta2, int theta3);

/// Parses "1,2,3", "GF(1,2,3)" or "NV".
std::vector<int> parse_thetas(const std::string& text);

std::string format_fraction(const Rational& r);
/// 17 significant digits.
std::string format_decimal(double value);

}  // namespace sdefw
