#pragma once

// Randomized splitting steps, path sampling, extrapolated estimation, a
// quadrature oracle and the operation-count model.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sdefw/extrapolation.hpp"
#include "sdefw/models.hpp"
#include "sdefw/randomness.hpp"

namespace sdefw {

/// Event counts gathered while sampling. Weighted by the per-operation costs
/// (a per flow solve, B per bit, Z per normal vector, 1 otherwise) they add up
/// to the closed-form cost.
struct OpCounts {
  std::uint64_t flow_solves = 0;
  std::uint64_t normal_vectors = 0;
  std::uint64_t bernoulli = 0;
  /// One per (level, column): the loop bookkeeping of a substep.
  std::uint64_t substeps = 0;
  /// One per (path, level); each visit costs five operations.
  std::uint64_t level_visits = 0;
  std::uint64_t paths = 0;
  /// Division by M and contraction with the weights: two per level.
  std::uint64_t final_ops = 0;

  double weighted_total(double a, double B, double Z) const noexcept;
  OpCounts& operator+=(const OpCounts& other) noexcept;
  friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

/// M (5m + n((d+1) a + Z + 1) sum(theta) + n B + 1) + 2m.
double cost_estimate(const SchemeSpec& scheme, int n, std::uint64_t M, int d, double a, double B, double Z);

/// Thread-local scratch for one sampler.
struct PathWorkspace {
  RkWorkspace rk;
  State state;
  PathRandomness randomness;
  std::vector<double> uniforms;
  std::vector<double> payoffs;
};

/// theta repetitions of the (d+1)-fold flow composition for step j at the
/// level described by draws: ascending field order when lambda is 1,
/// descending otherwise. Returns true if a flow clamped the state.
bool nv_step(std::span<double> state, const LevelDraws& draws, int step, bool lambda, const SdeModel& model,
             int n, RkWorkspace& ws, OpCounts* counts = nullptr);

/// Payoff after n steps at every level, sharing the bits across levels.
/// Returns true if any flow clamped the state.
bool sample_path(const SdeModel& model, const SchemeSpec& scheme, int n, const PathRandomness& randomness,
                 PathWorkspace& ws, std::vector<double>& payoffs, OpCounts* counts = nullptr);
std::vector<double> sample_path(const SdeModel& model, const SchemeSpec& scheme, int n,
                                const PathRandomness& randomness);

struct EstimateOptions {
  int workers = 1;
  Coupling coupling = Coupling::independent;
  /// Paths per work item. Part of the reduction shape, so results depend on it.
  std::size_t block_size = 1024;
  /// Largest tolerated fraction of aborted or clamped paths.
  double abort_tolerance = 1e-3;
};

struct LevelEstimate {
  int theta = 0;
  double weight = 0;
  double mean = 0;
  double standard_error = 0;
};

struct EstimateReport {
  std::string model;
  std::string scheme;
  std::string rng;
  int n = 0;
  std::uint64_t M = 0;
  std::vector<LevelEstimate> levels;
  /// sum_k weight_k * mean_k, evaluated from the stored means.
  double E = 0;
  double standard_error = 0;
  double elapsed_s = 0;
  double op_count = 0;
  OpCounts counts;
  std::uint64_t aborted_paths = 0;
  std::uint64_t clamped_paths = 0;

  static std::string csv_header();
  /// Summary row followed by one row per level.
  std::string to_csv() const;
};

/// Mean of M sampled payoff vectors contracted with the weights. Bit-identical
/// for any worker count.
EstimateReport estimate(const SdeModel& model, const SchemeSpec& scheme, int n, std::uint64_t M,
                        const PointSource& source, const EstimateOptions& options = {});

struct QuadratureOptions {
  int nodes = 16;
  /// A branch is dropped when the product of its node weights, each divided
  /// by the largest weight of the rule, falls below this; the dropped
  /// probability mass is reported as neglected_weight and the kept nodes
  /// are renormalized to unit mass.
  double prune_ratio = 1e-12;
  std::uint64_t evaluation_budget = 20'000'000'000ULL;
};

struct QuadratureResult {
  std::vector<double> level_expectations;
  double extrapolated = 0;
  double neglected_weight = 0;
  std::uint64_t evaluations = 0;
};

/// Tensor Gauss-Hermite expectation of each level and of the extrapolation,
/// averaging both orderings exactly at every step. Requires d = 1, exact
/// flows, theta_max n <= 8 and at least 16 nodes.
QuadratureResult quadrature_expectation(const SdeModel& model, const SchemeSpec& scheme, int n,
                                        const QuadratureOptions& options = {});

}  // namespace sdefw
