#pragma once

// Order conditions of generalized Fujiwara schemes checked exactly in the
// truncated free algebra.

#include <string>
#include <vector>

#include "sdefw/extrapolation.hpp"
#include "sdefw/free_algebra.hpp"

namespace sdefw::algebra {

/// sum_i f_i q^[theta_i] - p.
TruncatedSeries extrapolation_defect(const SchemeSpec& scheme, int d, int max_degree);

/// Passes iff j_{<=2m}(sum f q - p) = 0. verified_degree is the highest k with
/// j_{<=k} vanishing (capped at max_degree).
CheckResult order_condition_check(const SchemeSpec& scheme, int d, int max_degree);

/// Passes iff j_{<=2m+l-1}(sum f (q - p)^l) = 0; requires 2 <= l <= m-1.
CheckResult critical_check(const SchemeSpec& scheme, int l, int d, int max_degree);

/// Lowest degree of a nonvanishing graded component of sum f q - p, or -1.
int first_nonvanishing_degree(const SchemeSpec& scheme, int d, int max_degree);

struct VerificationLine {
  std::string name;
  int d = 0;
  int max_degree = 0;
  int m = 0;
  CheckResult result;

  /// `CHECK <name> d=<d> D=<D> m=<m> -> PASS|FAIL[degree]`
  std::string format() const;
};

struct VerificationReport {
  std::vector<VerificationLine> lines;
  bool all_pass() const;
  std::string format() const;
};

/// The full exact suite for the scheme theta = (1, ..., m) at alphabet size d+1
/// and truncation degree max_degree (defaults to 2m when <= 0).
VerificationReport verify_algebra(int m, int d, int max_degree);

}  // namespace sdefw::algebra
