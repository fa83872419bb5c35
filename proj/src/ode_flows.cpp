#include "sdefw/ode_flows.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "sdefw/error.hpp"
#include "sdefw/quadrature.hpp"

#ifndef SDEFW_DEFAULT_DATA_DIR
#define SDEFW_DEFAULT_DATA_DIR "data"
#endif

namespace sdefw {

namespace {

double parse_coefficient(const std::string& token) {
  try {
    const auto slash = token.find('/');
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const double v = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      return v;
    }
    const std::string num = token.substr(0, slash), den = token.substr(slash + 1);
    const double p = std::stod(num, &used);
    if (used != num.size()) throw std::invalid_argument(token);
    const double q = std::stod(den, &used);
    if (used != den.size() || q == 0) throw std::invalid_argument(token);
    return p / q;
  } catch (const std::exception&) {
    fail(ErrorKind::parameter, "bad tableau coefficient '" + token + "'");
  }
}

std::vector<double> parse_row(const std::string& line) {
  std::istringstream is(line);
  std::vector<double> row;
  std::string token;
  while (is >> token) row.push_back(parse_coefficient(token));
  return row;
}

void check_finite(std::span<const double> v, int stage) {
  for (double x : v) {
    if (!std::isfinite(x)) throw FlowFailure("non-finite value at RK stage " + std::to_string(stage), stage);
  }
}

}  // namespace

void ButcherTableau::validate() const {
  if (b.empty()) fail(ErrorKind::parameter, "tableau " + name + " has no stages");
  if (a.size() != b.size()) fail(ErrorKind::parameter, "tableau " + name + ": row count differs from weight count");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != i) {
      fail(ErrorKind::parameter, "tableau " + name + ": row " + std::to_string(i + 1) + " must have " +
                                     std::to_string(i) + " entries");
    }
  }
  double sum = 0;
  for (double w : b) sum += w;
  if (std::fabs(sum - 1.0) > 1e-12) fail(ErrorKind::parameter, "tableau " + name + ": weights do not sum to 1");
  if (declared_order < 1) fail(ErrorKind::parameter, "tableau " + name + ": declared order must be >= 1");
}

ButcherTableau parse_tableau(const std::string& text, const std::string& name) {
  std::istringstream is(text);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '#') continue;
    lines.push_back(line);
  }
  // Leading blank lines before the header are not significant.
  std::size_t pos = 0;
  while (pos < lines.size() && lines[pos].find_first_not_of(" \t") == std::string::npos) ++pos;
  if (pos == lines.size()) fail(ErrorKind::parameter, "empty tableau");

  ButcherTableau t;
  t.name = name;
  {
    std::istringstream header(lines[pos++]);
    int s = 0;
    if (!(header >> s >> t.declared_order) || s < 1) {
      fail(ErrorKind::parameter, "tableau header must be `stages order`");
    }
    if (lines.size() < pos + static_cast<std::size_t>(s) + 1) {
      fail(ErrorKind::parameter, "tableau truncated: expected " + std::to_string(s) + " rows and a weight row");
    }
    for (int i = 0; i < s; ++i) t.a.push_back(parse_row(lines[pos++]));
    t.b = parse_row(lines[pos++]);
  }
  t.validate();
  return t;
}

ButcherTableau load_tableau(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open tableau file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_tableau(ss.str(), path.stem().string());
}

std::filesystem::path data_directory() {
  if (const char* env = std::getenv("SDEFW_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return SDEFW_DEFAULT_DATA_DIR;
}

std::vector<std::string> shipped_tableau_names() { return {"euler", "heun", "rk4", "fehlberg7", "dop853"}; }

std::shared_ptr<const ButcherTableau> shipped_tableau(const std::string& name) {
  static std::mutex mutex;
  static std::map<std::string, std::shared_ptr<const ButcherTableau>> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(name); it != cache.end()) return it->second;
  const auto path = data_directory() / "tableaux" / (name + ".tab");
  if (!std::filesystem::exists(path)) {
    std::string known;
    for (const auto& n : shipped_tableau_names()) known += (known.empty() ? "" : ", ") + n;
    fail(ErrorKind::parameter, "unknown tableau '" + name + "' (shipped: " + known + ")");
  }
  auto tableau = std::make_shared<const ButcherTableau>(load_tableau(path));
  cache.emplace(name, tableau);
  return tableau;
}

void RkWorkspace::reserve(int stages, std::size_t dimension) {
  if (k_.size() < static_cast<std::size_t>(stages)) k_.resize(static_cast<std::size_t>(stages));
  for (auto& k : k_) k.resize(dimension);
  y_.resize(dimension);
}

void rk_step(const ButcherTableau& tableau, const VectorField& field, std::span<double> x, double h,
             RkWorkspace& ws) {
  const int s = tableau.stages();
  const std::size_t n = x.size();
  ws.reserve(s, n);
  auto& k = ws.stage_derivatives();
  auto& y = ws.stage_state();
  for (int i = 0; i < s; ++i) {
    const auto& row = tableau.a[static_cast<std::size_t>(i)];
    for (std::size_t c = 0; c < n; ++c) {
      double acc = 0;
      for (int j = 0; j < i; ++j) acc += row[static_cast<std::size_t>(j)] * k[static_cast<std::size_t>(j)][c];
      y[c] = x[c] + h * acc;
    }
    std::span<double> ki(k[static_cast<std::size_t>(i)].data(), n);
    field(std::span<const double>(y.data(), n), ki);
    check_finite(ki, i + 1);
  }
  for (std::size_t c = 0; c < n; ++c) {
    double acc = 0;
    for (int j = 0; j < s; ++j) acc += tableau.b[static_cast<std::size_t>(j)] * k[static_cast<std::size_t>(j)][c];
    x[c] += h * acc;
  }
  check_finite(x, s);
}

State rk_step(const ButcherTableau& tableau, const VectorField& field, const State& x, double h) {
  State out = x;
  RkWorkspace ws;
  rk_step(tableau, field, out, h, ws);
  return out;
}

void substep_flow(const ButcherTableau& tableau, const VectorField& field, std::span<double> x, double t, int k,
                  int n, RkWorkspace& ws) {
  if (k < 0 || n < 1) fail(ErrorKind::parameter, "substep_flow needs k >= 0 and n >= 1");
  long long count = 1;
  for (int i = 0; i < k; ++i) count *= n;
  const double h = t / static_cast<double>(count);
  for (long long i = 0; i < count; ++i) rk_step(tableau, field, x, h, ws);
}

State substep_flow(const ButcherTableau& tableau, const VectorField& field, const State& x, double t, int k,
                   int n) {
  State out = x;
  RkWorkspace ws;
  substep_flow(tableau, field, out, t, k, n, ws);
  return out;
}

FlowMap FlowMap::exact(ExactFlow flow) {
  FlowMap f;
  f.exact_ = std::move(flow);
  return f;
}

FlowMap FlowMap::numeric(std::shared_ptr<const ButcherTableau> tableau, VectorField field, int steps) {
  if (!tableau) fail(ErrorKind::parameter, "numeric flow needs a tableau");
  if (steps < 1) fail(ErrorKind::parameter, "numeric flow needs at least one step");
  FlowMap f;
  f.tableau_ = std::move(tableau);
  f.field_ = std::move(field);
  f.steps_ = steps;
  return f;
}

bool FlowMap::apply(double t, std::span<double> x, RkWorkspace& ws) const {
  if (exact_) {
    const bool clamped = exact_(t, x);
    check_finite(x, 0);
    return clamped;
  }
  const double h = t / steps_;
  for (int i = 0; i < steps_; ++i) rk_step(*tableau_, field_, x, h, ws);
  return false;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorKind::inconclusive, "slope needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

OrderEstimate estimate_order(const ButcherTableau& tableau, const VectorField& field, const ReferenceFlow& exact,
                             const State& x0, double horizon) {
  OrderEstimate est;
  RkWorkspace ws;
  const State reference = exact(horizon, x0);
  for (int j = 3; j <= 8; ++j) {
    const int steps = 1 << j;
    const double h = horizon / steps;
    State x = x0;
    for (int i = 0; i < steps; ++i) rk_step(tableau, field, x, h, ws);
    double err = 0;
    for (std::size_t c = 0; c < x.size(); ++c) {
      err = std::max(err, std::fabs(x[c] - reference[c]) / std::max(1.0, std::fabs(reference[c])));
    }
    if (err < 1e-13) continue;
    est.step_sizes.push_back(h);
    est.errors.push_back(err);
  }
  if (est.errors.size() < 3) {
    fail(ErrorKind::inconclusive, "order estimate for " + tableau.name + " has only " +
                                      std::to_string(est.errors.size()) + " usable points");
  }
  est.slope = loglog_slope(est.step_sizes, est.errors);
  return est;
}

double gaussian_flow_weak_error(const ButcherTableau& tableau, const VectorField& field, const ReferenceFlow& exact,
                                const State& x0, double t, const std::function<double(const State&)>& f) {
  RkWorkspace ws;
  auto expectation = [&](int points) {
    const GaussHermiteRule rule = gauss_hermite(points);
    double acc = 0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double h = std::sqrt(t) * rule.nodes[q];
      State x = x0;
      rk_step(tableau, field, x, h, ws);
      acc += rule.weights[q] * (f(exact(h, x0)) - f(x));
    }
    return acc;
  };
  const double coarse = expectation(64);
  const double fine = expectation(128);
  if (std::fabs(coarse - fine) > 1e-6 * std::fabs(fine) + 1e-16) {
    fail(ErrorKind::inconclusive, "Gauss-Hermite expectation did not converge (64 vs 128 points)");
  }
  return std::fabs(fine);
}

}  // namespace sdefw
