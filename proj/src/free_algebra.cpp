#include "sdefw/free_algebra.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>

#include "sdefw/error.hpp"

namespace sdefw::algebra {

namespace {

std::mutex limits_mutex;
SeriesLimits current_limits;

std::uint64_t ipow(std::uint64_t base, int exponent) {
  std::uint64_t r = 1;
  for (int i = 0; i < exponent; ++i) r *= base;
  return r;
}

}  // namespace

Word::Word(std::initializer_list<int> letters) : letters_(letters) {}
Word::Word(std::vector<int> letters) : letters_(std::move(letters)) {}

std::string Word::to_string() const {
  if (letters_.empty()) return "1";
  std::string s;
  for (int l : letters_) s += "a" + std::to_string(l);
  return s;
}

std::strong_ordering operator<=>(const Word& a, const Word& b) noexcept {
  if (auto c = a.degree() <=> b.degree(); c != 0) return c;
  return std::lexicographical_compare_three_way(a.letters_.begin(), a.letters_.end(),
                                                b.letters_.begin(), b.letters_.end());
}

SeriesLimits series_limits() noexcept {
  std::lock_guard lock(limits_mutex);
  return current_limits;
}

void set_series_limits(const SeriesLimits& limits) noexcept {
  std::lock_guard lock(limits_mutex);
  current_limits = limits;
}

std::uint64_t word_count(int alphabet_size, int max_degree) noexcept {
  std::uint64_t total = 0;
  std::uint64_t level = 1;
  for (int k = 0; k <= max_degree; ++k) {
    total += level;
    level *= static_cast<std::uint64_t>(alphabet_size);
  }
  return total;
}

TruncatedSeries::TruncatedSeries(int alphabet_size, int max_degree)
    : alphabet_size_(alphabet_size), max_degree_(max_degree) {
  if (alphabet_size < 1) fail(ErrorKind::parameter, "alphabet must contain at least one letter");
  if (max_degree < 0) fail(ErrorKind::parameter, "truncation degree must be nonnegative");
  const SeriesLimits limits = series_limits();
  if (max_degree > limits.max_degree || alphabet_size > limits.max_alphabet_size) {
    fail(ErrorKind::budget, "series shape (alphabet " + std::to_string(alphabet_size) + ", degree " +
                                std::to_string(max_degree) + ") exceeds configured limits (alphabet " +
                                std::to_string(limits.max_alphabet_size) + ", degree " +
                                std::to_string(limits.max_degree) + ")");
  }
  if (word_count(alphabet_size, max_degree) > limits.word_budget) {
    fail(ErrorKind::budget, "word count " + std::to_string(word_count(alphabet_size, max_degree)) +
                                " exceeds budget " + std::to_string(limits.word_budget));
  }
  grades_.resize(static_cast<std::size_t>(max_degree) + 1);
}

TruncatedSeries TruncatedSeries::unit(int alphabet_size, int max_degree) {
  TruncatedSeries s(alphabet_size, max_degree);
  s.grades_[0][0] = 1;
  return s;
}

TruncatedSeries TruncatedSeries::letter(int index, int alphabet_size, int max_degree) {
  TruncatedSeries s(alphabet_size, max_degree);
  if (index < 0 || index >= alphabet_size) {
    fail(ErrorKind::parameter, "letter a" + std::to_string(index) + " outside alphabet");
  }
  if (max_degree >= 1) s.grades_[1][static_cast<std::uint64_t>(index)] = 1;
  return s;
}

std::uint64_t TruncatedSeries::encode(const Word& w) const {
  std::uint64_t code = 0;
  for (int l : w.letters()) {
    if (l < 0 || l >= alphabet_size_) {
      fail(ErrorKind::parameter, "word " + w.to_string() + " uses a letter outside the alphabet");
    }
    code = code * static_cast<std::uint64_t>(alphabet_size_) + static_cast<std::uint64_t>(l);
  }
  return code;
}

Word TruncatedSeries::decode(int degree, std::uint64_t code) const {
  std::vector<int> letters(static_cast<std::size_t>(degree));
  for (int i = degree - 1; i >= 0; --i) {
    letters[static_cast<std::size_t>(i)] = static_cast<int>(code % static_cast<std::uint64_t>(alphabet_size_));
    code /= static_cast<std::uint64_t>(alphabet_size_);
  }
  return Word(std::move(letters));
}

void TruncatedSeries::require_same_shape(const TruncatedSeries& other, const char* op) const {
  if (alphabet_size_ != other.alphabet_size_ || max_degree_ != other.max_degree_) {
    fail(ErrorKind::parameter, std::string(op) + ": series shapes differ (alphabet " +
                                   std::to_string(alphabet_size_) + "/" + std::to_string(other.alphabet_size_) +
                                   ", degree " + std::to_string(max_degree_) + "/" +
                                   std::to_string(other.max_degree_) + ")");
  }
}

void TruncatedSeries::prune(int degree) {
  auto& g = grades_[static_cast<std::size_t>(degree)];
  std::erase_if(g, [](const auto& kv) { return sgn(kv.second) == 0; });
}

Rational TruncatedSeries::coefficient(const Word& w) const {
  if (w.degree() > max_degree_) return 0;
  const auto& g = grades_[static_cast<std::size_t>(w.degree())];
  auto it = g.find(encode(w));
  return it == g.end() ? Rational(0) : it->second;
}

void TruncatedSeries::add_term(const Word& w, const Rational& c) {
  if (w.degree() > max_degree_) return;
  auto& g = grades_[static_cast<std::size_t>(w.degree())];
  const std::uint64_t code = encode(w);
  Rational term = c;
  term.canonicalize();
  auto& slot = g[code];
  slot += term;
  if (sgn(slot) == 0) g.erase(code);
}

Rational TruncatedSeries::constant_term() const {
  auto it = grades_[0].find(0);
  return it == grades_[0].end() ? Rational(0) : it->second;
}

bool TruncatedSeries::is_zero() const noexcept {
  return std::all_of(grades_.begin(), grades_.end(), [](const auto& g) { return g.empty(); });
}

std::size_t TruncatedSeries::term_count() const noexcept {
  std::size_t n = 0;
  for (const auto& g : grades_) n += g.size();
  return n;
}

int TruncatedSeries::lowest_degree() const noexcept {
  for (std::size_t k = 0; k < grades_.size(); ++k) {
    if (!grades_[k].empty()) return static_cast<int>(k);
  }
  return -1;
}

std::vector<std::pair<Word, Rational>> TruncatedSeries::terms() const {
  std::vector<std::pair<Word, Rational>> out;
  for (int k = 0; k <= max_degree_; ++k) {
    for (const auto& [code, c] : grades_[static_cast<std::size_t>(k)]) out.emplace_back(decode(k, code), c);
  }
  return out;
}

std::vector<std::pair<Word, Rational>> TruncatedSeries::terms_of_degree(int degree) const {
  std::vector<std::pair<Word, Rational>> out;
  if (degree < 0 || degree > max_degree_) return out;
  for (const auto& [code, c] : grades_[static_cast<std::size_t>(degree)]) out.emplace_back(decode(degree, code), c);
  return out;
}

std::string TruncatedSeries::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [w, c] : terms()) {
    Rational mag = abs(c);
    if (first) {
      if (sgn(c) < 0) os << "-";
    } else {
      os << (sgn(c) < 0 ? " - " : " + ");
    }
    first = false;
    if (w.degree() == 0) {
      os << mag.get_str();
    } else {
      if (mag != 1) os << mag.get_str() << " ";
      os << w.to_string();
    }
  }
  if (first) os << "0";
  return os.str();
}

TruncatedSeries& TruncatedSeries::operator+=(const TruncatedSeries& other) {
  require_same_shape(other, "add");
  for (std::size_t k = 0; k < grades_.size(); ++k) {
    for (const auto& [code, c] : other.grades_[k]) grades_[k][code] += c;
    prune(static_cast<int>(k));
  }
  return *this;
}

TruncatedSeries& TruncatedSeries::operator-=(const TruncatedSeries& other) {
  require_same_shape(other, "subtract");
  for (std::size_t k = 0; k < grades_.size(); ++k) {
    for (const auto& [code, c] : other.grades_[k]) grades_[k][code] -= c;
    prune(static_cast<int>(k));
  }
  return *this;
}

TruncatedSeries& TruncatedSeries::operator*=(const Rational& scalar) {
  if (sgn(scalar) == 0) {
    for (auto& g : grades_) g.clear();
    return *this;
  }
  for (auto& g : grades_) {
    for (auto& kv : g) kv.second *= scalar;
  }
  return *this;
}

TruncatedSeries mul(const TruncatedSeries& x, const TruncatedSeries& y) {
  x.require_same_shape(y, "multiply");
  TruncatedSeries out(x.alphabet_size_, x.max_degree_);
  const auto base = static_cast<std::uint64_t>(x.alphabet_size_);
  Rational product;
  for (int i = 0; i <= x.max_degree_; ++i) {
    const auto& gx = x.grades_[static_cast<std::size_t>(i)];
    if (gx.empty()) continue;
    for (int j = 0; i + j <= x.max_degree_; ++j) {
      const auto& gy = y.grades_[static_cast<std::size_t>(j)];
      if (gy.empty()) continue;
      const std::uint64_t shift = ipow(base, j);
      auto& target = out.grades_[static_cast<std::size_t>(i + j)];
      for (const auto& [u, cu] : gx) {
        for (const auto& [v, cv] : gy) {
          product = cu * cv;
          target[u * shift + v] += product;
        }
      }
    }
  }
  for (int k = 0; k <= out.max_degree_; ++k) out.prune(k);
  return out;
}

TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) { return mul(a, b); }

bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
  return a.alphabet_size_ == b.alphabet_size_ && a.max_degree_ == b.max_degree_ && a.grades_ == b.grades_;
}

TruncatedSeries power(const TruncatedSeries& x, int exponent) {
  if (exponent < 0) fail(ErrorKind::parameter, "negative exponent");
  TruncatedSeries r = TruncatedSeries::unit(x.alphabet_size(), x.max_degree());
  for (int i = 0; i < exponent; ++i) r = mul(r, x);
  return r;
}

TruncatedSeries exp_trunc(const TruncatedSeries& u) {
  if (sgn(u.constant_term()) != 0) {
    fail(ErrorKind::domain, "exp_trunc requires a series with zero constant term");
  }
  TruncatedSeries result = TruncatedSeries::unit(u.alphabet_size(), u.max_degree());
  TruncatedSeries term = result;
  for (int n = 1; n <= u.max_degree(); ++n) {
    term = mul(term, u);
    term *= Rational(1, n);
    if (term.is_zero()) break;
    result += term;
  }
  return result;
}

TruncatedSeries log_trunc(const TruncatedSeries& v) {
  if (v.constant_term() != 1) fail(ErrorKind::domain, "log_trunc requires constant term 1");
  TruncatedSeries w = v - TruncatedSeries::unit(v.alphabet_size(), v.max_degree());
  TruncatedSeries result(v.alphabet_size(), v.max_degree());
  TruncatedSeries wn = w;
  for (int n = 1; n <= v.max_degree(); ++n) {
    if (wn.is_zero()) break;
    result += wn * Rational(n % 2 == 1 ? 1 : -1, n);
    wn = mul(wn, w);
  }
  return result;
}

TruncatedSeries project_exact(const TruncatedSeries& x, int m) {
  TruncatedSeries out(x.alphabet_size_, x.max_degree_);
  out.grades_[static_cast<std::size_t>(m)] = x.grades_[static_cast<std::size_t>(m)];
  return out;
}

TruncatedSeries project_upto(const TruncatedSeries& x, int m) {
  TruncatedSeries out(x.alphabet_size_, x.max_degree_);
  for (int k = 0; k <= m; ++k) out.grades_[static_cast<std::size_t>(k)] = x.grades_[static_cast<std::size_t>(k)];
  return out;
}

TruncatedSeries project(const TruncatedSeries& x, Projection mode, int m) {
  if (m < 0 || m > x.max_degree()) {
    fail(ErrorKind::parameter, "projection degree " + std::to_string(m) + " outside [0, " +
                                   std::to_string(x.max_degree()) + "]");
  }
  return mode == Projection::exact_degree ? project_exact(x, m) : project_upto(x, m);
}

TruncatedSeries build_p(int d, int max_degree) {
  if (d < 0) fail(ErrorKind::parameter, "d must be nonnegative");
  TruncatedSeries sum(d + 1, max_degree);
  for (int i = 0; i <= d; ++i) sum += TruncatedSeries::letter(i, d + 1, max_degree);
  return exp_trunc(sum);
}

TruncatedSeries build_q(int theta, Direction direction, int d, int max_degree) {
  if (theta < 1) fail(ErrorKind::parameter, "theta must be >= 1, got " + std::to_string(theta));
  if (d < 0) fail(ErrorKind::parameter, "d must be nonnegative");
  if (direction == Direction::symmetrized) {
    TruncatedSeries q = build_q(theta, Direction::forward, d, max_degree);
    q += build_q(theta, Direction::backward, d, max_degree);
    q *= Rational(1, 2);
    return q;
  }
  const int letters = d + 1;
  TruncatedSeries block = TruncatedSeries::unit(letters, max_degree);
  for (int k = 0; k <= d; ++k) {
    const int i = direction == Direction::forward ? k : d - k;
    block = mul(block, exp_trunc(TruncatedSeries::letter(i, letters, max_degree) * Rational(1, theta)));
  }
  return power(block, theta);
}

CheckResult fujiwara_expansion_check(int d, int max_degree) {
  if (max_degree < 1) fail(ErrorKind::parameter, "fujiwara_expansion_check needs degree >= 1");
  const TruncatedSeries lhs = log_trunc(build_q(1, Direction::backward, d, max_degree));
  const TruncatedSeries fwd = log_trunc(build_q(1, Direction::forward, d, max_degree));
  CheckResult r;
  r.pass = true;
  r.verified_degree = 0;
  for (int i = 1; i <= max_degree; ++i) {
    TruncatedSeries rhs_i = project(fwd, Projection::exact_degree, i);
    if (i % 2 == 0) rhs_i *= Rational(-1);
    if (!(project(lhs, Projection::exact_degree, i) == rhs_i)) {
      r.pass = false;
      r.failing_degree = i;
      return r;
    }
    r.verified_degree = i;
  }
  return r;
}

GradedComponent bch_component(const TruncatedSeries& x, const TruncatedSeries& y, int n) {
  if (n < 0 || n > x.max_degree()) {
    fail(ErrorKind::parameter, "BCH degree " + std::to_string(n) + " exceeds truncation degree " +
                                   std::to_string(x.max_degree()));
  }
  for (const auto* s : {&x, &y}) {
    if (s->is_zero()) continue;
    if (s->lowest_degree() != 1 || s->term_count() != s->terms_of_degree(1).size()) {
      fail(ErrorKind::parameter, "bch_component expects degree-1 homogeneous arguments");
    }
  }
  TruncatedSeries z = log_trunc(mul(exp_trunc(x), exp_trunc(y)));
  return {n, project(z, Projection::exact_degree, n)};
}

TruncatedSeries telescoping_expansion(const TruncatedSeries& q, const TruncatedSeries& p, int n, int m) {
  if (m < 1 || m > n) fail(ErrorKind::parameter, "telescoping expansion requires 1 <= m <= n");
  const TruncatedSeries diff = q - p;
  std::vector<TruncatedSeries> p_pow{TruncatedSeries::unit(p.alphabet_size(), p.max_degree())};
  std::vector<TruncatedSeries> q_pow{p_pow.front()};
  for (int k = 1; k <= n; ++k) {
    p_pow.push_back(mul(p_pow.back(), p));
    q_pow.push_back(mul(q_pow.back(), q));
  }

  TruncatedSeries total(p.alphabet_size(), p.max_degree());
  // Sum over 0 <= k_1 < ... < k_l <= n-1 of
  //   lead^{k_1} (q-p) p^{k_2-k_1-1} (q-p) ... (q-p) p^{n-k_l-1},
  // where lead is q for the last group (l = m) and p otherwise.
  std::vector<int> ks;
  auto recurse = [&](auto&& self, int l, int next_min, const TruncatedSeries& partial) -> void {
    const int placed = static_cast<int>(ks.size());
    if (placed == l) {
      total += mul(partial, p_pow[static_cast<std::size_t>(n - ks.back() - 1)]);
      return;
    }
    for (int k = next_min; k <= n - (l - placed); ++k) {
      TruncatedSeries next = partial;
      if (placed == 0) {
        next = mul(l == m ? q_pow[static_cast<std::size_t>(k)] : p_pow[static_cast<std::size_t>(k)], diff);
      } else {
        next = mul(mul(partial, p_pow[static_cast<std::size_t>(k - ks.back() - 1)]), diff);
      }
      ks.push_back(k);
      self(self, l, k + 1, next);
      ks.pop_back();
    }
  };
  for (int l = 1; l <= m; ++l) recurse(recurse, l, 0, p_pow.front());
  return total;
}

bool telescoping_identity_check(const TruncatedSeries& q, const TruncatedSeries& p, int n, int m) {
  return power(q, n) - power(p, n) == telescoping_expansion(q, p, n, m);
}

}  // namespace sdefw::algebra
