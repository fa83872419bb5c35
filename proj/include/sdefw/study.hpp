#pragma once

// Convergence studies driven by flat key = value configuration files.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdefw/algebra_checks.hpp"

namespace sdefw {

enum class StudyMode { mc, qmc, quadrature_oracle, algebra_verify };

const char* to_string(StudyMode mode) noexcept;
StudyMode parse_study_mode(const std::string& text);

struct StudyConfig {
  StudyMode mode = StudyMode::mc;
  std::string model = "gbm";
  std::map<std::string, double> model_params;
  std::vector<std::vector<int>> schemes = {{1}};
  std::vector<int> n_values = {2, 4};
  std::uint64_t M = 10000;
  /// Empty means the mode default: pseudo:1 for mc, sobol for qmc.
  std::string rng;
  std::string coupling = "independent";
  std::string tableau = "fehlberg7";
  /// Empty: use the model's closed form when it has one.
  std::optional<double> reference;
  /// `reference = none` switches error reporting off.
  bool reference_disabled = false;
  std::string output;
  int quadrature_nodes = 16;
  double prune_ratio = 1e-12;
  std::size_t block_size = 1024;
  // algebra-verify
  int algebra_m = 3;
  int algebra_d = 2;
  int algebra_degree = 0;

  /// Parses `key = value` lines; '#' starts a comment. Unknown keys and bad
  /// values raise a usage error naming the key.
  static StudyConfig parse(const std::string& text);
  static StudyConfig load(const std::string& path);

  /// Applies one `key=value` override.
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  /// Canonical text; parse(serialize()) == *this.
  std::string serialize() const;
  /// Cross-field checks (n increasing, oracle limits, rng/mode match).
  void validate() const;

  friend bool operator==(const StudyConfig&, const StudyConfig&) = default;
};

struct StudyRow {
  std::string model;
  std::string scheme;
  /// Empty for the extrapolated row, otherwise the level theta.
  int level_theta = 0;
  int n = 0;
  std::uint64_t M = 0;
  std::string rng;
  double E = 0;
  std::optional<double> standard_error;
  std::optional<double> elapsed_s;
  std::optional<double> op_count;
  std::optional<double> abs_error;
};

struct SchemeSlope {
  std::string scheme;
  /// Least-squares slope of log error against log n (negative for convergence).
  double slope = 0;
  int points = 0;
};

struct StudyResult {
  StudyMode mode = StudyMode::mc;
  std::vector<StudyRow> rows;
  std::vector<SchemeSlope> slopes;
  std::vector<std::string> warnings;
  std::optional<algebra::VerificationReport> verification;

  static std::string csv_header();
  std::string csv() const;
  /// Same table with the elapsed column blanked; stable across runs.
  std::string csv_without_timing() const;
  std::string summary() const;
  bool all_pass() const;
};

StudyResult run_study(const StudyConfig& config, int workers = 1);

struct PlotPoint {
  std::string scheme;
  int n = 0;
  double error = 0;
};

struct PlotData {
  std::string text;
  std::vector<std::string> warnings;
};

/// Two columns log10(n), log10(error) per scheme, with the fitted slope.
/// Schemes with fewer than two usable points are skipped with a warning.
PlotData emit_plotdata(const std::vector<PlotPoint>& table);
std::vector<PlotPoint> plot_points(const StudyResult& result);

}  // namespace sdefw
