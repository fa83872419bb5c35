#include "sdefw/scheme_engine.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "sdefw/error.hpp"
#include "sdefw/quadrature.hpp"

namespace sdefw {

namespace {

/// Kahan-Babuska-Neumaier running sum.
struct CompensatedSum {
  double sum = 0;
  double carry = 0;

  void add(double x) noexcept {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  void merge(const CompensatedSum& other) noexcept {
    add(other.sum);
    add(other.carry);
  }
  double value() const noexcept { return sum + carry; }
};

struct BlockResult {
  std::vector<CompensatedSum> level_sum;
  std::vector<CompensatedSum> level_sq;
  CompensatedSum combined_sum;
  CompensatedSum combined_sq;
  std::uint64_t valid = 0;
  std::uint64_t aborted = 0;
  std::uint64_t clamped = 0;
  OpCounts counts;

  explicit BlockResult(std::size_t levels = 0) : level_sum(levels), level_sq(levels) {}

  void merge(const BlockResult& other) {
    for (std::size_t k = 0; k < level_sum.size(); ++k) {
      level_sum[k].merge(other.level_sum[k]);
      level_sq[k].merge(other.level_sq[k]);
    }
    combined_sum.merge(other.combined_sum);
    combined_sq.merge(other.combined_sq);
    valid += other.valid;
    aborted += other.aborted;
    clamped += other.clamped;
    counts += other.counts;
  }
};

/// Fixed-shape pairwise reduction: the tree depends only on the block count.
BlockResult reduce_pairwise(std::vector<BlockResult>& blocks, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return blocks[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  BlockResult left = reduce_pairwise(blocks, lo, mid);
  left.merge(reduce_pairwise(blocks, mid, hi));
  return left;
}

double standard_error(double sum, double sum_sq, std::uint64_t count) {
  if (count < 2) return 0.0;
  const double c = static_cast<double>(count);
  const double mean = sum / c;
  const double var = std::max(0.0, (sum_sq - c * mean * mean) / (c - 1));
  return std::sqrt(var / c);
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quoted(const std::string& s) {
  return s.find(',') == std::string::npos ? s : "\"" + s + "\"";
}

std::string format_elapsed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

void apply_flow(const SdeModel& model, int field, double t, std::span<double> state, RkWorkspace& ws, int theta,
                int step, bool& clamped) {
  try {
    clamped |= model.flows[static_cast<std::size_t>(field)].apply(t, state, ws);
  } catch (const Error& e) {
    throw Error(e.kind(), "path abort at theta=" + std::to_string(theta) + " step=" + std::to_string(step) +
                              " field=" + std::to_string(field) + ": " + e.what());
  }
}

}  // namespace

double OpCounts::weighted_total(double a, double B, double Z) const noexcept {
  return a * static_cast<double>(flow_solves) + Z * static_cast<double>(normal_vectors) +
         B * static_cast<double>(bernoulli) + static_cast<double>(substeps) + 5.0 * static_cast<double>(level_visits) +
         static_cast<double>(paths) + static_cast<double>(final_ops);
}

OpCounts& OpCounts::operator+=(const OpCounts& o) noexcept {
  flow_solves += o.flow_solves;
  normal_vectors += o.normal_vectors;
  bernoulli += o.bernoulli;
  substeps += o.substeps;
  level_visits += o.level_visits;
  paths += o.paths;
  final_ops += o.final_ops;
  return *this;
}

double cost_estimate(const SchemeSpec& scheme, int n, std::uint64_t M, int d, double a, double B, double Z) {
  const double m = scheme.m();
  const double per_path = 5 * m + n * ((d + 1) * a + Z + 1) * scheme.theta_sum() + n * B + 1;
  return static_cast<double>(M) * per_path + 2 * m;
}

bool nv_step(std::span<double> state, const LevelDraws& draws, int step, bool lambda, const SdeModel& model, int n,
             RkWorkspace& ws, OpCounts* counts) {
  const int d = model.noise_dimension;
  if (draws.rows != d + 1) fail(ErrorKind::parameter, "draws do not match the model's noise dimension");
  bool clamped = false;
  for (int sub = 0; sub < draws.theta; ++sub) {
    const int col = sub * n + step;
    if (lambda) {
      for (int i = 0; i <= d; ++i) apply_flow(model, i, draws.at(i, col), state, ws, draws.theta, step, clamped);
    } else {
      for (int i = d; i >= 0; --i) apply_flow(model, i, draws.at(i, col), state, ws, draws.theta, step, clamped);
    }
    if (counts != nullptr) {
      counts->flow_solves += static_cast<std::uint64_t>(d + 1);
      counts->substeps += 1;
    }
  }
  return clamped;
}

bool sample_path(const SdeModel& model, const SchemeSpec& scheme, int n, const PathRandomness& randomness,
                 PathWorkspace& ws, std::vector<double>& payoffs, OpCounts* counts) {
  const std::size_t m = static_cast<std::size_t>(scheme.m());
  if (randomness.z.size() != m || randomness.lambda.size() != static_cast<std::size_t>(n)) {
    fail(ErrorKind::parameter, "path randomness does not match the scheme and n");
  }
  payoffs.resize(m);
  bool clamped = false;
  for (std::size_t k = 0; k < m; ++k) {
    const LevelDraws& draws = randomness.z[k];
    if (draws.theta != scheme.thetas()[k] || draws.cols != draws.theta * n) {
      fail(ErrorKind::parameter, "level draws do not match the scheme");
    }
    ws.state = model.x0;
    for (int j = 0; j < n; ++j) {
      clamped |= nv_step(ws.state, draws, j, randomness.lambda[static_cast<std::size_t>(j)] != 0, model, n, ws.rk,
                         counts);
    }
    payoffs[k] = model.payoff(ws.state);
    if (counts != nullptr) counts->level_visits += 1;
  }
  return clamped;
}

std::vector<double> sample_path(const SdeModel& model, const SchemeSpec& scheme, int n,
                                const PathRandomness& randomness) {
  PathWorkspace ws;
  std::vector<double> payoffs;
  sample_path(model, scheme, n, randomness, ws, payoffs);
  return payoffs;
}

std::string EstimateReport::csv_header() { return "model,scheme,n,M,rng,E,stderr,elapsed_s,op_count"; }

std::string EstimateReport::to_csv() const {
  std::ostringstream os;
  os << model << ',' << quoted(scheme) << ',' << n << ',' << M << ',' << rng << ',' << format_g17(E) << ','
     << format_g17(standard_error) << ',' << format_elapsed(elapsed_s) << ',' << format_g17(op_count) << '\n';
  for (const auto& level : levels) {
    os << model << ',' << quoted(scheme + "/theta=" + std::to_string(level.theta)) << ',' << n << ',' << M << ',' << rng << ',' << format_g17(level.mean)
       << ',' << format_g17(level.standard_error) << ",,\n";
  }
  return os.str();
}

EstimateReport estimate(const SdeModel& model, const SchemeSpec& scheme, int n, std::uint64_t M,
                        const PointSource& source, const EstimateOptions& options) {
  if (M < 1) fail(ErrorKind::parameter, "estimate needs M >= 1");
  if (n < 1) fail(ErrorKind::parameter, "estimate needs n >= 1");
  if (options.workers < 1) fail(ErrorKind::parameter, "estimate needs at least one worker");
  if (options.block_size < 1) fail(ErrorKind::parameter, "block size must be positive");
  const int d = model.noise_dimension;
  const int required = required_dimension(scheme, n, d, options.coupling);
  if (source.dimension() < required) {
    fail(ErrorKind::dimension_overflow, "point source has dimension " + std::to_string(source.dimension()) +
                                            ", each path needs " + std::to_string(required));
  }

  const auto start = std::chrono::steady_clock::now();
  const std::size_t m = static_cast<std::size_t>(scheme.m());
  const std::vector<double> weights = scheme.weights_as_double();
  const std::uint64_t normals_per_path =
      static_cast<std::uint64_t>(n) *
      static_cast<std::uint64_t>(options.coupling == Coupling::reuse ? scheme.theta_max() : scheme.theta_sum());
  const std::size_t block_count = static_cast<std::size_t>((M + options.block_size - 1) / options.block_size);
  std::vector<BlockResult> blocks(block_count, BlockResult(m));

  std::atomic<std::size_t> next_block{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    PathWorkspace ws;
    std::vector<double> payoffs;
    try {
      for (std::size_t b = next_block.fetch_add(1); b < block_count; b = next_block.fetch_add(1)) {
        BlockResult& out = blocks[b];
        const std::uint64_t first = b * options.block_size;
        const std::uint64_t last = std::min<std::uint64_t>(M, first + options.block_size);
        for (std::uint64_t path = first; path < last; ++path) {
          draw_path_randomness(source, path, scheme, n, d, model.horizon, options.coupling, ws.randomness,
                               ws.uniforms);
          out.counts.bernoulli += static_cast<std::uint64_t>(n);
          out.counts.normal_vectors += normals_per_path;
          out.counts.paths += 1;
          bool clamped = false;
          try {
            clamped = sample_path(model, scheme, n, ws.randomness, ws, payoffs, &out.counts);
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::numeric_failure && e.kind() != ErrorKind::inadmissible_state) throw;
            out.aborted += 1;
            continue;
          }
          if (clamped) out.clamped += 1;
          double combined = 0;
          for (std::size_t k = 0; k < m; ++k) {
            out.level_sum[k].add(payoffs[k]);
            out.level_sq[k].add(payoffs[k] * payoffs[k]);
            combined += weights[k] * payoffs[k];
          }
          out.combined_sum.add(combined);
          out.combined_sq.add(combined * combined);
          out.valid += 1;
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next_block.store(block_count);
    }
  };

  const int thread_count = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(options.workers), block_count));
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  BlockResult total = reduce_pairwise(blocks, 0, block_count);
  const std::uint64_t flagged = total.aborted + total.clamped;
  if (static_cast<double>(flagged) > options.abort_tolerance * static_cast<double>(M) || total.valid == 0) {
    fail(ErrorKind::estimation, std::to_string(total.aborted) + " aborted and " + std::to_string(total.clamped) +
                                    " clamped paths out of " + std::to_string(M) + " exceed the tolerance");
  }

  EstimateReport report;
  report.model = model.name;
  report.scheme = scheme.label();
  report.rng = source.describe();
  report.n = n;
  report.M = M;
  report.aborted_paths = total.aborted;
  report.clamped_paths = total.clamped;
  const double count = static_cast<double>(total.valid);
  double E = 0;
  for (std::size_t k = 0; k < m; ++k) {
    LevelEstimate level;
    level.theta = scheme.thetas()[k];
    level.weight = weights[k];
    level.mean = total.level_sum[k].value() / count;
    level.standard_error = standard_error(total.level_sum[k].value(), total.level_sq[k].value(), total.valid);
    E += level.weight * level.mean;
    report.levels.push_back(level);
  }
  report.E = E;
  report.standard_error = standard_error(total.combined_sum.value(), total.combined_sq.value(), total.valid);
  total.counts.final_ops = 2 * static_cast<std::uint64_t>(m);
  report.counts = total.counts;
  report.op_count = total.counts.weighted_total(1, 1, 1);
  report.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

namespace {

class QuadratureWalker {
 public:
  QuadratureWalker(const SdeModel& model, int theta, int n, const GaussHermiteRule& rule,
                   const QuadratureOptions& options, QuadratureResult& result)
      : model_(model), theta_(theta), n_(n), rule_(rule), options_(options), result_(result) {
    dt_ = model.horizon / (static_cast<double>(n) * theta);
    scale_ = std::sqrt(dt_);
    double w_max = 0;
    for (double w : rule.weights) w_max = std::max(w_max, w);
    for (double w : rule.weights) ratio_.push_back(w / w_max);
    stack_.assign(static_cast<std::size_t>(n * theta + 1), model.x0);
    drifted_ = stack_;
  }

  double run() { return step(0, 0, 1.0, 1.0); }

 private:
  // depth counts the Gaussian dimensions already integrated; the state at
  // that depth lives in stack_[depth]. mass is the probability of the branch,
  // ratio the product of node weights relative to the central node.
  double step(int j, int depth, double mass, double ratio) {
    if (j == n_) {
      if (++result_.evaluations > options_.evaluation_budget) {
        fail(ErrorKind::budget, "quadrature evaluation budget exceeded");
      }
      return model_.payoff(stack_[static_cast<std::size_t>(depth)]);
    }
    return 0.5 * substep(j, 0, true, depth, 0.5 * mass, ratio) +
           0.5 * substep(j, 0, false, depth, 0.5 * mass, ratio);
  }

  double substep(int j, int sub, bool lambda, int depth, double mass, double ratio) {
    if (sub == theta_) return step(j + 1, depth, mass, ratio);
    const State* x = &stack_[static_cast<std::size_t>(depth)];
    State& y = stack_[static_cast<std::size_t>(depth + 1)];
    const bool leaf = j == n_ - 1 && sub == theta_ - 1;
    if (lambda) {
      // The drift flow comes first and does not depend on the node.
      State& drifted = drifted_[static_cast<std::size_t>(depth)];
      drifted = *x;
      check_clamp(model_.flows[0].apply(dt_, drifted, ws_));
      x = &drifted;
    }
    double acc = 0;
    double kept = 0;
    double dropped = 0;
    std::uint64_t leaves = 0;
    for (std::size_t q = 0; q < rule_.nodes.size(); ++q) {
      const double w = rule_.weights[q];
      if (ratio * ratio_[q] < options_.prune_ratio) {
        dropped += w;
        continue;
      }
      kept += w;
      std::copy(x->begin(), x->end(), y.begin());
      const double z = scale_ * rule_.nodes[q];
      if (lambda) {
        check_clamp(model_.flows[1].apply(z, y, ws_));
      } else {
        bool clamped = model_.flows[1].apply(z, y, ws_);
        clamped |= model_.flows[0].apply(dt_, y, ws_);
        check_clamp(clamped);
      }
      if (leaf) {
        acc += w * model_.payoff(y);
        ++leaves;
      } else {
        acc += w * substep(j, sub + 1, lambda, depth + 1, mass * w, ratio * ratio_[q]);
      }
    }
    result_.neglected_weight += mass * dropped;
    if (leaves != 0) {
      result_.evaluations += leaves;
      if (result_.evaluations > options_.evaluation_budget) {
        fail(ErrorKind::budget, "quadrature evaluation budget exceeded");
      }
    }
    return acc / kept;
  }

  static void check_clamp(bool clamped) {
    if (clamped) fail(ErrorKind::inadmissible_state, "flow clamped the state inside the quadrature oracle");
  }

  const SdeModel& model_;
  int theta_;
  int n_;
  const GaussHermiteRule& rule_;
  const QuadratureOptions& options_;
  QuadratureResult& result_;
  double scale_ = 0;
  double dt_ = 0;
  std::vector<double> ratio_;
  std::vector<State> stack_;
  std::vector<State> drifted_;
  RkWorkspace ws_;
};

}  // namespace

QuadratureResult quadrature_expectation(const SdeModel& model, const SchemeSpec& scheme, int n,
                                        const QuadratureOptions& options) {
  if (model.noise_dimension != 1) fail(ErrorKind::parameter, "quadrature oracle needs a model with d = 1");
  if (!model.all_flows_exact()) fail(ErrorKind::parameter, "quadrature oracle needs exact flows");
  if (n < 1) fail(ErrorKind::parameter, "quadrature oracle needs n >= 1");
  if (options.nodes < 16) fail(ErrorKind::parameter, "quadrature oracle needs at least 16 nodes per dimension");
  if (static_cast<long long>(scheme.theta_max()) * n > 8) {
    fail(ErrorKind::dimension_overflow, "quadrature oracle supports theta_max * n <= 8, got " +
                                            std::to_string(static_cast<long long>(scheme.theta_max()) * n));
  }
  const GaussHermiteRule rule = gauss_hermite(options.nodes);
  QuadratureResult result;
  const auto weights = scheme.weights_as_double();
  for (std::size_t k = 0; k < scheme.thetas().size(); ++k) {
    QuadratureWalker walker(model, scheme.thetas()[k], n, rule, options, result);
    const double value = walker.run();
    result.level_expectations.push_back(value);
    result.extrapolated += weights[k] * value;
  }
  return result;
}

}  // namespace sdefw
