#include "sdefw/extrapolation.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "sdefw/error.hpp"

namespace sdefw {

namespace {

void validate_thetas(const std::vector<int>& thetas) {
  if (thetas.empty()) fail(ErrorKind::parameter, "scheme needs at least one level");
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (thetas[i] < 1) fail(ErrorKind::parameter, "theta values must be positive integers");
    if (i > 0 && thetas[i] == thetas[i - 1]) {
      fail(ErrorKind::singular, "repeated theta " + std::to_string(thetas[i]) + " makes the system singular");
    }
    if (i > 0 && thetas[i] < thetas[i - 1]) fail(ErrorKind::parameter, "theta values must be strictly increasing");
  }
}

Rational inv_theta_pow(int theta, int l) {
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), static_cast<unsigned long>(theta), static_cast<unsigned long>(2 * l));
  return Rational(mpz_class(1), den);
}

}  // namespace

int SchemeSpec::theta_sum() const noexcept {
  int s = 0;
  for (int t : thetas_) s += t;
  return s;
}

std::vector<double> SchemeSpec::weights_as_double() const {
  std::vector<double> out;
  out.reserve(weights_.size());
  for (const auto& w : weights_) out.push_back(w.get_d());
  return out;
}

std::string SchemeSpec::label() const {
  if (thetas_.size() == 1 && thetas_[0] == 1) return "NV";
  std::string s = "GF(";
  for (std::size_t i = 0; i < thetas_.size(); ++i) s += (i ? "," : "") + std::to_string(thetas_[i]);
  return s + ")";
}

double SchemeSpec::weight_magnitude() const {
  double s = 0;
  for (const auto& w : weights_) s += std::fabs(w.get_d());
  return s;
}

bool SchemeSpec::satisfies_moment_conditions() const {
  for (int l = 0; l < m(); ++l) {
    Rational row = 0;
    for (std::size_t i = 0; i < thetas_.size(); ++i) row += weights_[i] * inv_theta_pow(thetas_[i], l);
    if (row != (l == 0 ? 1 : 0)) return false;
  }
  return true;
}

SchemeSpec solve_weights(const std::vector<int>& thetas) {
  validate_thetas(thetas);
  const std::size_t m = thetas.size();
  // Augmented system [A | e_1].
  std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m + 1));
  for (std::size_t l = 0; l < m; ++l) {
    for (std::size_t i = 0; i < m; ++i) a[l][i] = inv_theta_pow(thetas[i], static_cast<int>(l));
    a[l][m] = l == 0 ? 1 : 0;
  }
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    while (pivot < m && sgn(a[pivot][col]) == 0) ++pivot;
    if (pivot == m) fail(ErrorKind::singular, "extrapolation matrix is singular");
    std::swap(a[pivot], a[col]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col || sgn(a[r][col]) == 0) continue;
      const Rational factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= m; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  SchemeSpec spec;
  spec.thetas_ = thetas;
  spec.weights_.resize(m);
  for (std::size_t i = 0; i < m; ++i) spec.weights_[i] = a[i][m] / a[i][i];
  return spec;
}

std::vector<Rational> closed_form_m3(int theta1, int theta2, int theta3) {
  validate_thetas({theta1, theta2, theta3});
  const Rational s1 = theta1 * theta1, s2 = theta2 * theta2, s3 = theta3 * theta3;
  return {s1 * s1 / ((s2 - s1) * (s3 - s1)), -s2 * s2 / ((s3 - s2) * (s2 - s1)),
          s3 * s3 / ((s3 - s1) * (s3 - s2))};
}

std::vector<int> parse_thetas(const std::string& raw) {
  std::string text;
  for (char c : raw) {
    if (c != ' ' && c != '\t') text += c;
  }
  if (text == "NV" || text == "nv") return {1};
  if (text.size() > 4 && text.rfind("GF(", 0) == 0 && text.back() == ')') text = text.substr(3, text.size() - 4);
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      fail(ErrorKind::parameter, "theta values must be positive integers, got '" + item + "'");
    }
  }
  validate_thetas(out);
  return out;
}

std::string format_fraction(const Rational& r) { return r.get_str(); }

std::string format_decimal(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace sdefw
