#include "sdefw/algebra_checks.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "sdefw/error.hpp"

namespace sdefw::algebra {

namespace {

CheckResult vanishing_through(const TruncatedSeries& x, int degree) {
  CheckResult r;
  const int low = x.lowest_degree();
  r.verified_degree = low < 0 ? x.max_degree() : low - 1;
  r.pass = low < 0 || low > degree;
  if (!r.pass) r.failing_degree = low;
  return r;
}

}  // namespace

TruncatedSeries extrapolation_defect(const SchemeSpec& scheme, int d, int max_degree) {
  TruncatedSeries sum(d + 1, max_degree);
  for (int i = 0; i < scheme.m(); ++i) {
    sum += build_q(scheme.thetas()[static_cast<std::size_t>(i)], Direction::symmetrized, d, max_degree) *
           scheme.weights()[static_cast<std::size_t>(i)];
  }
  return sum - build_p(d, max_degree);
}

CheckResult order_condition_check(const SchemeSpec& scheme, int d, int max_degree) {
  const int target = 2 * scheme.m();
  if (max_degree < target) {
    fail(ErrorKind::parameter, "order condition needs degree >= " + std::to_string(target));
  }
  return vanishing_through(extrapolation_defect(scheme, d, max_degree), target);
}

CheckResult critical_check(const SchemeSpec& scheme, int l, int d, int max_degree) {
  const int m = scheme.m();
  if (l < 2 || l > m - 1) {
    fail(ErrorKind::parameter, "critical check needs 2 <= l <= m-1, got l=" + std::to_string(l) +
                                   " with m=" + std::to_string(m));
  }
  const int target = 2 * m + l - 1;
  if (max_degree < target) {
    fail(ErrorKind::parameter, "critical check needs degree >= " + std::to_string(target));
  }
  const TruncatedSeries p = build_p(d, max_degree);
  TruncatedSeries sum(d + 1, max_degree);
  for (int i = 0; i < m; ++i) {
    const TruncatedSeries diff =
        build_q(scheme.thetas()[static_cast<std::size_t>(i)], Direction::symmetrized, d, max_degree) - p;
    sum += power(diff, l) * scheme.weights()[static_cast<std::size_t>(i)];
  }
  return vanishing_through(sum, target);
}

int first_nonvanishing_degree(const SchemeSpec& scheme, int d, int max_degree) {
  return extrapolation_defect(scheme, d, max_degree).lowest_degree();
}

std::string VerificationLine::format() const {
  std::ostringstream os;
  os << "CHECK " << name << " d=" << d << " D=" << max_degree << " m=" << m << " -> ";
  if (result.pass) {
    os << "PASS";
  } else {
    os << "FAIL[" << result.failing_degree << "]";
  }
  return os.str();
}

bool VerificationReport::all_pass() const {
  return std::all_of(lines.begin(), lines.end(), [](const auto& l) { return l.result.pass; });
}

std::string VerificationReport::format() const {
  std::string out;
  for (const auto& l : lines) out += l.format() + "\n";
  return out;
}

VerificationReport verify_algebra(int m, int d, int max_degree) {
  if (m < 1) fail(ErrorKind::parameter, "m must be >= 1");
  if (d < 0) fail(ErrorKind::parameter, "d must be >= 0");
  if (max_degree <= 0) max_degree = 2 * m;
  if (max_degree < 2 * m) fail(ErrorKind::parameter, "degree must be >= 2m");

  std::vector<int> thetas(static_cast<std::size_t>(m));
  std::iota(thetas.begin(), thetas.end(), 1);
  const SchemeSpec scheme = solve_weights(thetas);

  VerificationReport report;
  auto add = [&](std::string name, CheckResult r) {
    report.lines.push_back({std::move(name), d, max_degree, m, r});
  };

  CheckResult weights;
  weights.pass = scheme.satisfies_moment_conditions();
  weights.failing_degree = weights.pass ? -1 : 0;
  add("weights_moment_conditions", weights);

  {
    const TruncatedSeries p = build_p(d, max_degree);
    const int low = std::min(2, max_degree);
    CheckResult agree;
    agree.pass = true;
    for (int theta : thetas) {
      const TruncatedSeries q = build_q(theta, Direction::symmetrized, d, max_degree);
      const CheckResult r = vanishing_through(project(q - p, Projection::up_to_degree, low), low);
      if (!r.pass) agree = r;
    }
    if (agree.pass) agree.verified_degree = low;
    add("q_matches_p_through_degree_2", agree);

    CheckResult positive;
    positive.pass = true;
    for (int theta : thetas) {
      const TruncatedSeries q = build_q(theta, Direction::symmetrized, d, max_degree);
      for (const auto& [w, c] : q.terms()) {
        if (sgn(c) < 0 && positive.pass) {
          positive.pass = false;
          positive.failing_degree = w.degree();
        }
      }
    }
    add("q_coefficients_nonnegative", positive);
  }

  add("order_condition", order_condition_check(scheme, d, max_degree));

  {
    const int low = first_nonvanishing_degree(scheme, d, max_degree);
    CheckResult parity;
    parity.pass = low < 0 || low % 2 == 1;
    if (!parity.pass) parity.failing_degree = low;
    add("first_defect_degree_odd", parity);
  }

  for (int l = 2; l <= m - 1; ++l) {
    if (2 * m + l - 1 > max_degree) continue;
    add("critical_l" + std::to_string(l), critical_check(scheme, l, d, max_degree));
  }

  add("fujiwara_expansion", fujiwara_expansion_check(d, max_degree));

  if (d >= 1) {
    const TruncatedSeries x = TruncatedSeries::letter(0, d + 1, max_degree);
    const TruncatedSeries y = TruncatedSeries::letter(1, d + 1, max_degree);
    CheckResult anti;
    anti.pass = true;
    for (int n = 1; n <= max_degree; ++n) {
      TruncatedSeries swapped = bch_component(y, x, n).series;
      if (n % 2 == 0) swapped *= Rational(-1);
      if (!(bch_component(x, y, n).series == swapped)) {
        anti.pass = false;
        anti.failing_degree = n;
        break;
      }
      anti.verified_degree = n;
    }
    add("bch_antisymmetry", anti);
  }
  return report;
}

}  // namespace sdefw::algebra
