#pragma once

// Truncated noncommutative power series over the alphabet {a_0, ..., a_d}
// with exact rational coefficients.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace sdefw::algebra {

using Rational = mpq_class;

/// A word is a finite sequence of letter indices; the empty word is the unit.
/// Words compare by degree first, then lexicographically with a_0 < a_1 < ...
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<int> letters);
  explicit Word(std::vector<int> letters);

  int degree() const noexcept { return static_cast<int>(letters_.size()); }
  const std::vector<int>& letters() const noexcept { return letters_; }
  std::string to_string() const;

  friend std::strong_ordering operator<=>(const Word& a, const Word& b) noexcept;
  friend bool operator==(const Word& a, const Word& b) noexcept = default;

 private:
  std::vector<int> letters_;
};

/// Guards against (d+1)^D blow-up. Applied whenever a series is constructed.
struct SeriesLimits {
  int max_degree = 10;
  int max_alphabet_size = 4;
  std::uint64_t word_budget = std::uint64_t{1} << 22;
};

SeriesLimits series_limits() noexcept;
void set_series_limits(const SeriesLimits& limits) noexcept;

/// Number of words of degree <= max_degree over an alphabet of the given size.
std::uint64_t word_count(int alphabet_size, int max_degree) noexcept;

class TruncatedSeries {
 public:
  /// The zero series over {a_0..a_{alphabet_size-1}}, truncated above max_degree.
  TruncatedSeries(int alphabet_size, int max_degree);

  static TruncatedSeries unit(int alphabet_size, int max_degree);
  static TruncatedSeries letter(int index, int alphabet_size, int max_degree);

  int alphabet_size() const noexcept { return alphabet_size_; }
  int max_degree() const noexcept { return max_degree_; }

  Rational coefficient(const Word& w) const;
  void add_term(const Word& w, const Rational& c);

  Rational constant_term() const;
  bool is_zero() const noexcept;
  std::size_t term_count() const noexcept;
  /// Lowest degree carrying a nonzero coefficient, or -1 for the zero series.
  int lowest_degree() const noexcept;
  /// Terms in (degree, lexicographic) order; zero coefficients are never stored.
  std::vector<std::pair<Word, Rational>> terms() const;
  /// Terms of a single degree, same order.
  std::vector<std::pair<Word, Rational>> terms_of_degree(int degree) const;

  std::string to_string() const;

  TruncatedSeries& operator+=(const TruncatedSeries& other);
  TruncatedSeries& operator-=(const TruncatedSeries& other);
  TruncatedSeries& operator*=(const Rational& scalar);

  friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
  friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }
  friend TruncatedSeries operator-(TruncatedSeries a) { return a *= Rational(-1); }
  friend TruncatedSeries operator*(TruncatedSeries a, const Rational& s) { return a *= s; }
  friend TruncatedSeries operator*(const Rational& s, TruncatedSeries a) { return a *= s; }
  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b);
  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b);

 private:
  friend TruncatedSeries mul(const TruncatedSeries& x, const TruncatedSeries& y);
  friend TruncatedSeries project_exact(const TruncatedSeries& x, int m);
  friend TruncatedSeries project_upto(const TruncatedSeries& x, int m);

  std::uint64_t encode(const Word& w) const;
  Word decode(int degree, std::uint64_t code) const;
  void require_same_shape(const TruncatedSeries& other, const char* op) const;
  void prune(int degree);

  int alphabet_size_;
  int max_degree_;
  // grades_[k] maps the base-(d+1) code of a degree-k word to its coefficient.
  std::vector<std::map<std::uint64_t, Rational>> grades_;
};

TruncatedSeries mul(const TruncatedSeries& x, const TruncatedSeries& y);
TruncatedSeries power(const TruncatedSeries& x, int exponent);

/// sum_{n=0}^{D} u^n / n!; u must have zero constant term.
TruncatedSeries exp_trunc(const TruncatedSeries& u);
/// sum_{n=1}^{D} (-1)^{n-1} (v-1)^n / n; v must have constant term 1.
TruncatedSeries log_trunc(const TruncatedSeries& v);

enum class Projection { exact_degree, up_to_degree };

/// j_m (exact_degree) or j_{<=m} (up_to_degree).
TruncatedSeries project(const TruncatedSeries& x, Projection mode, int m);

struct GradedComponent {
  int degree;
  TruncatedSeries series;
};

/// p = exp(a_0 + ... + a_d).
TruncatedSeries build_p(int d, int max_degree);

enum class Direction { forward, backward, symmetrized };

/// q^[theta]: (exp(a_0/theta)...exp(a_d/theta))^theta for forward, the reversed
/// product for backward, and their average for symmetrized.
TruncatedSeries build_q(int theta, Direction direction, int d, int max_degree);

struct CheckResult {
  bool pass = false;
  /// Lowest degree at which the identity fails; -1 when it holds throughout.
  int failing_degree = -1;
  /// Highest degree through which the identity was confirmed.
  int verified_degree = -1;
};

/// log(backward q^[1]) == sum_i (-1)^{i+1} j_i(log(forward q^[1])), degree by degree.
CheckResult fujiwara_expansion_check(int d, int max_degree);

/// Degree-n homogeneous part of log(exp X exp Y) for degree-1 homogeneous X, Y.
GradedComponent bch_component(const TruncatedSeries& x, const TruncatedSeries& y, int n);

/// q^n - p^n against the telescoping expansion that keeps up to m factors (q - p).
bool telescoping_identity_check(const TruncatedSeries& q, const TruncatedSeries& p, int n, int m);

/// Right-hand side of the telescoping expansion (exposed for tests and diagnostics).
TruncatedSeries telescoping_expansion(const TruncatedSeries& q, const TruncatedSeries& p, int n, int m);

}  // namespace sdefw::algebra
