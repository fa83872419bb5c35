#include <gtest/gtest.h>

#include "support.hpp"

#include <random>

#include "sdefw/algebra_checks.hpp"
#include "sdefw/error.hpp"
#include "sdefw/free_algebra.hpp"

using namespace sdefw;
using namespace sdefw::algebra;

namespace {

TruncatedSeries letter(int i, int alphabet, int D) { return TruncatedSeries::letter(i, alphabet, D); }
TruncatedSeries one(int alphabet, int D) { return TruncatedSeries::unit(alphabet, D); }

TruncatedSeries random_series(std::mt19937& rng, int alphabet, int D, bool zero_constant, int terms = 6) {
  TruncatedSeries s(alphabet, D);
  std::uniform_int_distribution<int> deg(zero_constant ? 1 : 0, D);
  std::uniform_int_distribution<int> let(0, alphabet - 1);
  std::uniform_int_distribution<int> num(-5, 5);
  std::uniform_int_distribution<int> den(1, 4);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> letters(static_cast<std::size_t>(deg(rng)));
    for (auto& l : letters) l = let(rng);
    s.add_term(Word(letters), Rational(num(rng), den(rng)));
  }
  return s;
}


}  // namespace

TEST(Word, DegreeAndOrder) {
  EXPECT_EQ(Word{}.degree(), 0);
  EXPECT_EQ((Word{0, 1, 1}).degree(), 3);
  EXPECT_LT(Word{1}, (Word{0, 0}));
  EXPECT_LT((Word{0, 1}), (Word{1, 0}));
  EXPECT_NE((Word{0, 1}), (Word{1, 0}));
}

TEST(Mul, Distributivity) {
  auto x = one(2, 2) + letter(0, 2, 2);
  auto y = one(2, 2) + letter(1, 2, 2);
  TruncatedSeries expected = one(2, 2);
  expected.add_term(Word{0}, 1);
  expected.add_term(Word{1}, 1);
  expected.add_term(Word{0, 1}, 1);
  EXPECT_EQ(mul(x, y), expected);
}

TEST(Mul, UnitIsNeutral) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    auto x = random_series(rng, 3, 4, false);
    EXPECT_EQ(x * one(3, 4), x);
    EXPECT_EQ(one(3, 4) * x, x);
  }
}

TEST(Mul, Noncommutative) {
  auto s = letter(0, 2, 2) + letter(1, 2, 2);
  auto sq = s * s;
  EXPECT_EQ(sq.term_count(), 4u);
  for (auto w : {Word{0, 0}, Word{0, 1}, Word{1, 0}, Word{1, 1}}) EXPECT_EQ(sq.coefficient(w), 1);
  EXPECT_NE(letter(0, 2, 2) * letter(1, 2, 2), letter(1, 2, 2) * letter(0, 2, 2));
}

TEST(Mul, DropsWordsAboveTruncation) {
  auto a = letter(0, 1, 2);
  EXPECT_TRUE((a * a * a).is_zero());
}

TEST(Mul, ShapeMismatchIsParameterError) {
  EXPECT_ERROR_KIND(mul(one(2, 3), one(3, 3)), ErrorKind::parameter);
  EXPECT_ERROR_KIND(mul(one(2, 3), one(2, 4)), ErrorKind::parameter);
}

TEST(Series, CanonicalFormHasNoZeroCoefficients) {
  TruncatedSeries s(2, 3);
  s.add_term(Word{0, 1}, Rational(1, 2));
  s.add_term(Word{0, 1}, Rational(-1, 2));
  EXPECT_TRUE(s.is_zero());
  EXPECT_EQ(s.term_count(), 0u);
  EXPECT_EQ(s.lowest_degree(), -1);
}

TEST(Series, RejectsWordsOutsideAlphabet) {
  TruncatedSeries s(2, 3);
  EXPECT_ERROR_KIND(s.add_term(Word{2}, 1), ErrorKind::parameter);
}

TEST(Series, WordBudgetGuard) {
  EXPECT_ERROR_KIND(TruncatedSeries(4, 14), ErrorKind::budget);
}

TEST(Series, RingAxioms) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const int alphabet = 2 + trial % 2;
    const int D = 3 + trial % 3;
    auto x = random_series(rng, alphabet, D, false);
    auto y = random_series(rng, alphabet, D, false);
    auto z = random_series(rng, alphabet, D, false);
    EXPECT_EQ((x * y) * z, x * (y * z));
    EXPECT_EQ(x * (y + z), x * y + x * z);
    EXPECT_EQ((x + y) * z, x * z + y * z);
    EXPECT_EQ(x + y, y + x);
    EXPECT_TRUE((x - x).is_zero());
  }
}

TEST(Exp, SingleLetter) {
  TruncatedSeries expected = one(1, 3);
  expected.add_term(Word{0}, 1);
  expected.add_term(Word{0, 0}, Rational(1, 2));
  expected.add_term(Word{0, 0, 0}, Rational(1, 6));
  EXPECT_EQ(exp_trunc(letter(0, 1, 3)), expected);
}

TEST(Exp, ZeroGivesUnit) { EXPECT_EQ(exp_trunc(TruncatedSeries(3, 4)), one(3, 4)); }

TEST(Exp, NonzeroConstantIsDomainError) {
  EXPECT_ERROR_KIND(exp_trunc(one(2, 3)), ErrorKind::domain);
}

TEST(Log, UnitGivesZero) { EXPECT_TRUE(log_trunc(one(2, 4)).is_zero()); }

TEST(Log, InvertsExpOfLetterSum) {
  auto u = letter(0, 2, 4) + letter(1, 2, 4);
  EXPECT_EQ(log_trunc(exp_trunc(u)), u);
}

TEST(Log, DegreeTwoBakerCampbellHausdorff) {
  auto a0 = letter(0, 2, 2), a1 = letter(1, 2, 2);
  auto expected = a0 + a1 + Rational(1, 2) * (a0 * a1 - a1 * a0);
  EXPECT_EQ(log_trunc(exp_trunc(a0) * exp_trunc(a1)), expected);
}

TEST(Log, ConstantNotOneIsDomainError) {
  EXPECT_ERROR_KIND(log_trunc(TruncatedSeries(2, 3)), ErrorKind::domain);
  EXPECT_ERROR_KIND(log_trunc(Rational(2) * one(2, 3)), ErrorKind::domain);
}

TEST(ExpLog, RoundTripOnRandomSparseSeries) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int alphabet = 1 + trial % 3;
    const int D = 1 + trial % 6;
    auto u = random_series(rng, alphabet, D, true, 4);
    EXPECT_EQ(log_trunc(exp_trunc(u)), u) << "trial " << trial;
    auto v = one(alphabet, D) + u;
    EXPECT_EQ(exp_trunc(log_trunc(v)), v) << "trial " << trial;
  }
}

TEST(Project, ExactAndUpTo) {
  TruncatedSeries x = one(2, 3);
  x.add_term(Word{0}, 1);
  x.add_term(Word{0, 1}, 1);
  EXPECT_EQ(project(x, Projection::exact_degree, 1), letter(0, 2, 3));
  EXPECT_EQ(project(x, Projection::up_to_degree, 1), one(2, 3) + letter(0, 2, 3));
}

TEST(Project, DegreeAboveTruncationIsParameterError) {
  EXPECT_ERROR_KIND(project(one(2, 3), Projection::exact_degree, 4), ErrorKind::parameter);
}

TEST(Project, LowDegreeOfQMatchesP) {
  for (int d = 0; d <= 2; ++d) {
    const auto p2 = project(build_p(d, 4), Projection::up_to_degree, 2);
    for (int theta = 1; theta <= 3; ++theta) {
      EXPECT_EQ(project(build_q(theta, Direction::symmetrized, d, 4), Projection::up_to_degree, 2), p2)
          << "d=" << d << " theta=" << theta;
    }
  }
}

TEST(BuildP, SmallCases) {
  TruncatedSeries p0 = one(1, 2);
  p0.add_term(Word{0}, 1);
  p0.add_term(Word{0, 0}, Rational(1, 2));
  EXPECT_EQ(build_p(0, 2), p0);
  EXPECT_EQ(build_p(1, 1), one(2, 1) + letter(0, 2, 1) + letter(1, 2, 1));
}

TEST(BuildP, EveryWordHasInverseFactorialCoefficient) {
  const auto p = build_p(2, 5);
  EXPECT_EQ(p.term_count(), word_count(3, 5));
  Rational factorial = 1;
  for (int k = 0; k <= 5; ++k) {
    if (k > 0) factorial *= k;
    for (const auto& [w, c] : p.terms_of_degree(k)) EXPECT_EQ(c, 1 / factorial) << w.to_string();
  }
}

TEST(BuildQ, SingleLetterIsExp) {
  for (int theta = 1; theta <= 4; ++theta) {
    for (auto dir : {Direction::forward, Direction::backward, Direction::symmetrized}) {
      EXPECT_EQ(build_q(theta, dir, 0, 5), exp_trunc(letter(0, 1, 5)));
    }
  }
}

TEST(BuildQ, CoefficientsNonnegative) {
  for (int d = 1; d <= 2; ++d) {
    for (int theta = 1; theta <= 3; ++theta) {
      for (const auto& [w, c] : build_q(theta, Direction::symmetrized, d, 5).terms()) {
        EXPECT_GE(c, 0) << w.to_string();
      }
    }
  }
}

TEST(BuildQ, SymmetrizedIsAverage) {
  auto f = build_q(2, Direction::forward, 2, 4);
  auto b = build_q(2, Direction::backward, 2, 4);
  EXPECT_EQ(build_q(2, Direction::symmetrized, 2, 4), Rational(1, 2) * (f + b));
}

TEST(BuildQ, ThetaBelowOneIsParameterError) {
  EXPECT_ERROR_KIND(build_q(0, Direction::forward, 1, 3), ErrorKind::parameter);
}

TEST(FujiwaraExpansion, HoldsForSmallAlphabets) {
  for (int d = 0; d <= 2; ++d) {
    for (int D = 1; D <= 5; ++D) {
      const auto r = fujiwara_expansion_check(d, D);
      EXPECT_TRUE(r.pass) << "d=" << d << " D=" << D << " failing degree " << r.failing_degree;
      EXPECT_EQ(r.failing_degree, -1);
      EXPECT_EQ(r.verified_degree, D);
    }
  }
}

TEST(Bch, FirstComponentIsSum) {
  auto x = letter(0, 2, 3), y = letter(1, 2, 3);
  const auto c1 = bch_component(x, y, 1);
  EXPECT_EQ(c1.degree, 1);
  EXPECT_EQ(c1.series, x + y);
}

TEST(Bch, SecondComponentIsHalfCommutator) {
  auto x = letter(0, 2, 3), y = letter(1, 2, 3);
  EXPECT_EQ(bch_component(x, y, 2).series, Rational(1, 2) * (x * y - y * x));
}

TEST(Bch, ThirdComponentMatchesKnownFormula) {
  auto x = letter(0, 2, 3), y = letter(1, 2, 3);
  auto xy = x * y - y * x;
  auto expected = Rational(1, 12) * (x * xy - xy * x) - Rational(1, 12) * (y * xy - xy * y);
  EXPECT_EQ(bch_component(x, y, 3).series, expected);
}

TEST(Bch, Antisymmetry) {
  auto x = letter(0, 2, 5), y = letter(1, 2, 5);
  for (int n = 1; n <= 5; ++n) {
    const Rational sign = n % 2 == 1 ? 1 : -1;
    EXPECT_EQ(bch_component(x, y, n).series, sign * bch_component(y, x, n).series) << "n=" << n;
  }
}

TEST(Bch, RejectsBadArguments) {
  EXPECT_ERROR_KIND(bch_component(letter(0, 2, 3), letter(1, 2, 3), 4), ErrorKind::parameter);
  EXPECT_ERROR_KIND(bch_component(one(2, 3), letter(1, 2, 3), 2), ErrorKind::parameter);
}

TEST(OrderCondition, PassesForListedSchemes) {
  const std::vector<std::vector<int>> schemes = {{1}, {1, 2}, {2, 3}, {1, 2, 3}};
  for (const auto& thetas : schemes) {
    const auto scheme = solve_weights(thetas);
    for (int d = 1; d <= 2; ++d) {
      const int D = 2 * scheme.m();
      const auto r = order_condition_check(scheme, d, D);
      EXPECT_TRUE(r.pass) << scheme.label() << " d=" << d;
      EXPECT_GE(r.verified_degree, D);
    }
  }
}

TEST(OrderCondition, NeedsEnoughDegree) {
  EXPECT_ERROR_KIND(order_condition_check(solve_weights({1, 2}), 1, 3), ErrorKind::parameter);
}

TEST(OrderCondition, WrongWeightsFailAtDegreeThree) {
  // Plain q^[2] is only second order: the defect first shows at degree 3.
  const auto r = order_condition_check(solve_weights({2}), 1, 4);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.verified_degree, 2);
  EXPECT_EQ(first_nonvanishing_degree(solve_weights({2}), 1, 4), 3);
}

TEST(Parity, FirstNonvanishingDegreeIsOdd) {
  const std::vector<std::vector<int>> schemes = {{1}, {2}, {3}, {1, 2}, {2, 3}, {1, 3}};
  for (const auto& thetas : schemes) {
    const auto scheme = solve_weights(thetas);
    for (int d = 1; d <= 2; ++d) {
      const int k = first_nonvanishing_degree(scheme, d, 2 * scheme.m() + 1);
      EXPECT_EQ(k, 2 * scheme.m() + 1) << scheme.label() << " d=" << d;
      EXPECT_EQ(k % 2, 1);
    }
  }
}

TEST(Critical, ThreeLevelsSquare) {
  const auto r = critical_check(solve_weights({1, 2, 3}), 2, 1, 7);
  EXPECT_TRUE(r.pass);
  EXPECT_GE(r.verified_degree, 7);
}

TEST(Critical, LevelRangeIsChecked) {
  const auto s = solve_weights({1, 2, 3});
  EXPECT_ERROR_KIND(critical_check(s, 1, 1, 7), ErrorKind::parameter);
  EXPECT_ERROR_KIND(critical_check(s, 3, 1, 8), ErrorKind::parameter);
  EXPECT_ERROR_KIND(critical_check(s, 2, 1, 6), ErrorKind::parameter);
}

TEST(Telescoping, FirstOrderSplit) {
  auto q = build_q(1, Direction::symmetrized, 1, 4);
  auto p = build_p(1, 4);
  auto rhs = q * (q - p) + (q - p) * p;
  EXPECT_EQ(power(q, 2) - power(p, 2), rhs);
  EXPECT_EQ(telescoping_expansion(q, p, 2, 1), rhs);
  EXPECT_TRUE(telescoping_identity_check(q, p, 2, 1));
}

TEST(Telescoping, EqualArgumentsGiveZero) {
  auto p = build_p(1, 4);
  EXPECT_TRUE(telescoping_identity_check(p, p, 3, 2));
  EXPECT_TRUE(telescoping_expansion(p, p, 3, 2).is_zero());
}

TEST(Telescoping, RandomSparseArguments) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto q = one(2, 5) + random_series(rng, 2, 5, true, 5);
    auto p = one(2, 5) + random_series(rng, 2, 5, true, 5);
    for (int n = 1; n <= 4; ++n) {
      for (int m = 1; m <= n; ++m) EXPECT_TRUE(telescoping_identity_check(q, p, n, m)) << n << "," << m;
    }
  }
}

TEST(Telescoping, RejectsBadOrder) {
  auto p = build_p(1, 3);
  EXPECT_ERROR_KIND(telescoping_expansion(p, p, 2, 3), ErrorKind::parameter);
}

TEST(Report, LineFormat) {
  VerificationLine line{"order_condition", 2, 6, 3, {true, -1, 6}};
  EXPECT_EQ(line.format(), "CHECK order_condition d=2 D=6 m=3 -> PASS");
  line.result = {false, 5, 4};
  EXPECT_EQ(line.format(), "CHECK order_condition d=2 D=6 m=3 -> FAIL[5]");
}

TEST(Report, SuiteForThreeLevelsPasses) {
  const auto r = verify_algebra(3, 2, 0);
  EXPECT_TRUE(r.all_pass()) << r.format();
  EXPECT_GE(r.lines.size(), 3u);
}
