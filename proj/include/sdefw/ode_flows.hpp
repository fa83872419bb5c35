#pragma once

// Explicit Runge-Kutta flows of autonomous fields x' = V(x).

#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sdefw {

using State = std::vector<double>;

/// out = V(x). Must not resize out.
using VectorField = std::function<void(std::span<const double> x, std::span<double> out)>;

struct ButcherTableau {
  std::string name;
  int declared_order = 0;
  /// a[i] has exactly i entries (strictly lower triangular).
  std::vector<std::vector<double>> a;
  std::vector<double> b;

  int stages() const noexcept { return static_cast<int>(b.size()); }
  /// Throws parameter error on shape problems or sum(b) != 1.
  void validate() const;
};

/// Plain-text tableau: line `s order`, then s rows of a (row i has i-1
/// entries, so the first row is empty), then one row of b. Tokens are
/// decimals or `p/q` rationals. Lines starting with '#' are comments.
ButcherTableau parse_tableau(const std::string& text, const std::string& name = "");
ButcherTableau load_tableau(const std::filesystem::path& path);

/// Tableaux shipped in data/tableaux, by file stem (euler, heun, rk4, fehlberg7, dop853).
std::shared_ptr<const ButcherTableau> shipped_tableau(const std::string& name);
std::vector<std::string> shipped_tableau_names();
/// Directory that holds data/ (SDEFW_DATA_DIR overrides the build-time default).
std::filesystem::path data_directory();

/// Scratch space for stage values; one per thread.
class RkWorkspace {
 public:
  void reserve(int stages, std::size_t dimension);
  std::vector<State>& stage_derivatives() noexcept { return k_; }
  State& stage_state() noexcept { return y_; }

 private:
  std::vector<State> k_;
  State y_;
};

/// One explicit RK step of size h, in place. Throws FlowFailure (stage index
/// attached) when a stage evaluation or the result is not finite.
void rk_step(const ButcherTableau& tableau, const VectorField& field, std::span<double> x, double h,
             RkWorkspace& ws);
State rk_step(const ButcherTableau& tableau, const VectorField& field, const State& x, double h);

/// count(=n^k) consecutive steps of size t/count.
void substep_flow(const ButcherTableau& tableau, const VectorField& field, std::span<double> x, double t,
                  int k, int n, RkWorkspace& ws);
State substep_flow(const ButcherTableau& tableau, const VectorField& field, const State& x, double t, int k,
                   int n);

/// exp(tV) either in closed form or by a tableau with a fixed number of steps.
class FlowMap {
 public:
  /// Returns true when the map had to clamp the state to stay admissible.
  using ExactFlow = std::function<bool(double t, std::span<double> x)>;

  static FlowMap exact(ExactFlow flow);
  static FlowMap numeric(std::shared_ptr<const ButcherTableau> tableau, VectorField field, int steps = 1);

  bool is_exact() const noexcept { return static_cast<bool>(exact_); }
  const ButcherTableau* tableau() const noexcept { return tableau_.get(); }
  int steps() const noexcept { return steps_; }

  /// True when an exact flow clamped the state; numeric flows never clamp.
  bool apply(double t, std::span<double> x, RkWorkspace& ws) const;

 private:
  ExactFlow exact_;
  std::shared_ptr<const ButcherTableau> tableau_;
  VectorField field_;
  int steps_ = 1;
};

/// x(t) for the test problem, given x(0) = x0.
using ReferenceFlow = std::function<State(double t, const State& x0)>;

struct OrderEstimate {
  double slope = 0;
  std::vector<double> step_sizes;
  std::vector<double> errors;
};

/// Least-squares slope of log(error) against log(h), h = T/2^j for j = 3..8.
/// Errors below 1e-13 are dropped; fewer than three usable points is
/// inconclusive. The error is the max-norm difference relative to max(1, |x|).
OrderEstimate estimate_order(const ButcherTableau& tableau, const VectorField& field, const ReferenceFlow& exact,
                             const State& x0, double horizon);

/// |E f(exact(sqrt(t) Z, x0)) - E f(RK step of size sqrt(t) Z)|, Z ~ N(0,1),
/// by Gauss-Hermite quadrature; throws inconclusive if 64- and 128-point
/// rules disagree.
double gaussian_flow_weak_error(const ButcherTableau& tableau, const VectorField& field, const ReferenceFlow& exact,
                                const State& x0, double t, const std::function<double(const State&)>& f);

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace sdefw
