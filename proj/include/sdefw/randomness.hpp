#pragma once

// Reproducible random inputs for path sampling: ordering bits, Gaussian
// increments, and a Gray-code Sobol sequence for QMC.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sdefw/extrapolation.hpp"

namespace sdefw {

/// Direction numbers in Joe-Kuo layout. Dimension 1 is the van der Corput
/// sequence and is not stored in the file.
class DirectionNumbers {
 public:
  static constexpr int bits = 32;

  static DirectionNumbers load(const std::filesystem::path& path);
  /// data/sobol/joe-kuo-1024.txt, loaded once.
  static const DirectionNumbers& shipped();

  int max_dimension() const noexcept { return static_cast<int>(v_.size()); }
  /// v_1..v_32 for the given 0-based coordinate, scaled by 2^32.
  const std::uint32_t* vectors(int coordinate) const noexcept { return v_[static_cast<std::size_t>(coordinate)].data(); }

 private:
  std::vector<std::vector<std::uint32_t>> v_;
};

class SobolSequence {
 public:
  static constexpr std::uint64_t max_points = std::uint64_t{1} << 32;

  /// The first call to next() returns the point with index 1 + skip.
  SobolSequence(int dimension, std::uint64_t skip = 0,
                const DirectionNumbers& directions = DirectionNumbers::shipped());

  int dimension() const noexcept { return dimension_; }
  /// Index of the point the next call to next() returns.
  std::uint64_t index() const noexcept { return index_; }

  std::span<const double> next();
  /// Point with the given index, computed directly from its Gray code.
  void point_at(std::uint64_t index, std::span<double> out) const;

 private:
  int dimension_;
  const DirectionNumbers* directions_;
  std::uint64_t index_;
  std::vector<std::uint32_t> state_;
  std::vector<double> point_;
};

/// Standard normal quantile. u must lie strictly inside (0, 1).
double gaussian_inverse_cdf(double u);

/// Counter-based uniform generator: the value depends only on (seed, stream,
/// path, counter), so any path can be regenerated in isolation.
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t path, std::uint64_t counter) noexcept;

class PointSource {
 public:
  enum class Kind { pseudo, sobol };

  static PointSource pseudo(std::uint64_t seed, std::uint64_t stream_id, int dimension);
  static PointSource sobol(int dimension, std::uint64_t skip = 0);
  /// "pseudo:<seed>" or "sobol" / "sobol:<skip>".
  static PointSource parse(const std::string& spec, int dimension);

  Kind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return dimension_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t skip() const noexcept { return skip_; }
  std::string describe() const;

  /// The dimension() uniforms that belong to a path.
  void fill(std::uint64_t path_index, std::span<double> out) const;

 private:
  Kind kind_ = Kind::pseudo;
  int dimension_ = 0;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t skip_ = 0;
};

enum class Coupling { independent, reuse };

Coupling parse_coupling(const std::string& text);
const char* to_string(Coupling c) noexcept;

/// (d+1) x (theta n) matrix, row major. Row 0 is the drift time T/(n theta);
/// rows 1..d are N(0, T/(n theta)) increments.
struct LevelDraws {
  int theta = 0;
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  double at(int row, int col) const noexcept { return values[static_cast<std::size_t>(row * cols + col)]; }
  double& at(int row, int col) noexcept { return values[static_cast<std::size_t>(row * cols + col)]; }
};

struct PathRandomness {
  /// lambda[j] == 1 selects the ascending field order at step j.
  std::vector<std::uint8_t> lambda;
  std::vector<LevelDraws> z;
};

/// Uniforms consumed per path: n bits plus sum_k d theta_k n normals
/// (independent) or n + d theta_max n (reuse).
int required_dimension(const SchemeSpec& scheme, int n, int d, Coupling coupling);

/// Layout: coordinates 0..n-1 are the bits (u >= 1/2 gives 1), then the
/// Gaussians level by level, column by column, field by field. Under reuse,
/// level k reads the first d theta_k n normals of the theta_max block.
PathRandomness draw_path_randomness(const PointSource& source, std::uint64_t path_index, const SchemeSpec& scheme,
                                    int n, int d, double horizon, Coupling coupling);

/// Allocation-free variant for the sampling loop; uniforms is scratch space.
void draw_path_randomness(const PointSource& source, std::uint64_t path_index, const SchemeSpec& scheme, int n, int d,
                          double horizon, Coupling coupling, PathRandomness& out, std::vector<double>& uniforms);

}  // namespace sdefw
