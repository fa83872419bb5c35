#include "sdefw/randomness.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>

#include "sdefw/error.hpp"
#include "sdefw/ode_flows.hpp"

namespace sdefw {

namespace {

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t parse_u64(const std::string& text, const char* what) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    fail(ErrorKind::usage, std::string("bad ") + what + " '" + text + "'");
  }
  return value;
}

}  // namespace

DirectionNumbers DirectionNumbers::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open direction numbers " + path.string());
  DirectionNumbers dn;
  std::vector<std::uint32_t> first(bits);
  for (int k = 0; k < bits; ++k) first[static_cast<std::size_t>(k)] = std::uint32_t{1} << (bits - 1 - k);
  dn.v_.push_back(std::move(first));

  std::string line;
  std::getline(in, line);  // column header
  while (std::getline(in, line)) {
    std::istringstream is(line);
    int dim = 0, s = 0;
    std::uint64_t a = 0;
    if (!(is >> dim >> s >> a)) continue;
    if (dim != dn.max_dimension() + 1 || s < 1 || s > bits) {
      fail(ErrorKind::io, "malformed direction-number row for dimension " + std::to_string(dim));
    }
    std::vector<std::uint32_t> v(bits);
    for (int k = 0; k < s; ++k) {
      std::uint64_t m = 0;
      if (!(is >> m)) fail(ErrorKind::io, "missing m_i in dimension " + std::to_string(dim));
      v[static_cast<std::size_t>(k)] = static_cast<std::uint32_t>(m << (bits - 1 - k));
    }
    for (int k = s; k < bits; ++k) {
      std::uint32_t x = v[static_cast<std::size_t>(k - s)] ^ (v[static_cast<std::size_t>(k - s)] >> s);
      for (int r = 1; r < s; ++r) {
        if ((a >> (s - 1 - r)) & 1U) x ^= v[static_cast<std::size_t>(k - r)];
      }
      v[static_cast<std::size_t>(k)] = x;
    }
    dn.v_.push_back(std::move(v));
  }
  return dn;
}

const DirectionNumbers& DirectionNumbers::shipped() {
  static const DirectionNumbers dn = load(data_directory() / "sobol" / "joe-kuo-1024.txt");
  return dn;
}

SobolSequence::SobolSequence(int dimension, std::uint64_t skip, const DirectionNumbers& directions)
    : dimension_(dimension), directions_(&directions), index_(skip + 1) {
  if (dimension < 1) fail(ErrorKind::parameter, "Sobol dimension must be positive");
  if (dimension > directions.max_dimension()) {
    fail(ErrorKind::dimension_overflow, "Sobol dimension " + std::to_string(dimension) + " required, " +
                                            std::to_string(directions.max_dimension()) + " supported");
  }
  if (index_ >= max_points) fail(ErrorKind::budget, "Sobol skip exceeds the 2^32-point budget");
  state_.assign(static_cast<std::size_t>(dimension), 0);
  point_.assign(static_cast<std::size_t>(dimension), 0.0);
  // State holds the point with index index_ - 1, so next() advances by one Gray-code step.
  const std::uint64_t prev = index_ - 1;
  const std::uint64_t gray = prev ^ (prev >> 1);
  for (int j = 0; j < dimension; ++j) {
    const std::uint32_t* v = directions.vectors(j);
    std::uint32_t x = 0;
    for (int k = 0; k < DirectionNumbers::bits; ++k) {
      if ((gray >> k) & 1U) x ^= v[k];
    }
    state_[static_cast<std::size_t>(j)] = x;
  }
}

std::span<const double> SobolSequence::next() {
  if (index_ >= max_points) fail(ErrorKind::budget, "Sobol sequence exhausted its 2^32 points");
  // Bit that changes between the Gray codes of index_-1 and index_.
  const int c = std::countr_zero(index_);
  for (int j = 0; j < dimension_; ++j) {
    auto& s = state_[static_cast<std::size_t>(j)];
    s ^= directions_->vectors(j)[c];
    point_[static_cast<std::size_t>(j)] = static_cast<double>(s) * 0x1p-32;
  }
  ++index_;
  return point_;
}

void SobolSequence::point_at(std::uint64_t index, std::span<double> out) const {
  if (index == 0 || index >= max_points) fail(ErrorKind::budget, "Sobol index outside [1, 2^32)");
  if (out.size() < static_cast<std::size_t>(dimension_)) fail(ErrorKind::parameter, "output span too small");
  const std::uint64_t gray = index ^ (index >> 1);
  for (int j = 0; j < dimension_; ++j) {
    const std::uint32_t* v = directions_->vectors(j);
    std::uint32_t x = 0;
    for (std::uint64_t g = gray; g != 0; g &= g - 1) x ^= v[std::countr_zero(g)];
    out[static_cast<std::size_t>(j)] = static_cast<double>(x) * 0x1p-32;
  }
}

double gaussian_inverse_cdf(double u) {
  if (!(u > 0.0 && u < 1.0)) fail(ErrorKind::domain, "inverse normal CDF needs u in (0,1)");
  if (u > 0.5) return -gaussian_inverse_cdf(1.0 - u);

  // Rational approximation (Acklam), then one Halley step against erfc.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  double x;
  if (u < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = u - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - u;
  const double t = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - t / (1.0 + 0.5 * x * t);
}

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t path, std::uint64_t counter) noexcept {
  std::uint64_t h = mix64(seed ^ 0x9e3779b97f4a7c15ULL);
  h = mix64(h ^ (stream + 0x632be59bd9b4e019ULL));
  h = mix64(h ^ (path + 0x8cb92ba72f3d8dd7ULL));
  h = mix64(h ^ (counter + 0xd1b54a32d192ed03ULL));
  return (static_cast<double>(h >> 11) + 0.5) * 0x1p-53;
}

PointSource PointSource::pseudo(std::uint64_t seed, std::uint64_t stream_id, int dimension) {
  if (dimension < 1) fail(ErrorKind::parameter, "point source dimension must be positive");
  PointSource s;
  s.kind_ = Kind::pseudo;
  s.seed_ = seed;
  s.stream_id_ = stream_id;
  s.dimension_ = dimension;
  return s;
}

PointSource PointSource::sobol(int dimension, std::uint64_t skip) {
  if (dimension < 1) fail(ErrorKind::parameter, "point source dimension must be positive");
  const int supported = DirectionNumbers::shipped().max_dimension();
  if (dimension > supported) {
    fail(ErrorKind::dimension_overflow, "Sobol dimension " + std::to_string(dimension) + " required, " +
                                            std::to_string(supported) + " supported");
  }
  PointSource s;
  s.kind_ = Kind::sobol;
  s.dimension_ = dimension;
  s.skip_ = skip;
  return s;
}

PointSource PointSource::parse(const std::string& spec, int dimension) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "pseudo") {
    if (tail.empty()) fail(ErrorKind::usage, "rng 'pseudo' needs a seed, as in pseudo:42");
    return pseudo(parse_u64(tail, "seed"), 0, dimension);
  }
  if (head == "sobol") return sobol(dimension, tail.empty() ? 0 : parse_u64(tail, "skip"));
  fail(ErrorKind::usage, "unknown rng '" + spec + "' (expected pseudo:<seed> or sobol[:skip])");
}

std::string PointSource::describe() const {
  if (kind_ == Kind::pseudo) return "pseudo:" + std::to_string(seed_);
  return skip_ == 0 ? std::string("sobol") : "sobol:" + std::to_string(skip_);
}

void PointSource::fill(std::uint64_t path_index, std::span<double> out) const {
  if (out.size() < static_cast<std::size_t>(dimension_)) fail(ErrorKind::parameter, "output span too small");
  if (kind_ == Kind::pseudo) {
    for (int j = 0; j < dimension_; ++j) {
      out[static_cast<std::size_t>(j)] = counter_uniform(seed_, stream_id_, path_index, static_cast<std::uint64_t>(j));
    }
    return;
  }
  const std::uint64_t index = path_index + skip_ + 1;
  if (index >= SobolSequence::max_points) fail(ErrorKind::budget, "Sobol sequence exhausted its 2^32 points");
  const std::uint64_t gray = index ^ (index >> 1);
  const auto& dn = DirectionNumbers::shipped();
  for (int j = 0; j < dimension_; ++j) {
    const std::uint32_t* v = dn.vectors(j);
    std::uint32_t x = 0;
    for (std::uint64_t g = gray; g != 0; g &= g - 1) x ^= v[std::countr_zero(g)];
    out[static_cast<std::size_t>(j)] = static_cast<double>(x) * 0x1p-32;
  }
}

Coupling parse_coupling(const std::string& text) {
  if (text == "independent") return Coupling::independent;
  if (text == "reuse") return Coupling::reuse;
  fail(ErrorKind::usage, "unknown coupling '" + text + "' (expected independent or reuse)");
}

const char* to_string(Coupling c) noexcept { return c == Coupling::reuse ? "reuse" : "independent"; }

int required_dimension(const SchemeSpec& scheme, int n, int d, Coupling coupling) {
  const long long per_column = static_cast<long long>(d) * n;
  const long long gaussians =
      coupling == Coupling::reuse ? per_column * scheme.theta_max() : per_column * scheme.theta_sum();
  const long long total = n + gaussians;
  if (total > (1LL << 30)) fail(ErrorKind::dimension_overflow, "path dimension too large");
  return static_cast<int>(total);
}

void draw_path_randomness(const PointSource& source, std::uint64_t path_index, const SchemeSpec& scheme, int n, int d,
                          double horizon, Coupling coupling, PathRandomness& out, std::vector<double>& uniforms) {
  if (n < 1 || d < 0) fail(ErrorKind::parameter, "draw_path_randomness needs n >= 1 and d >= 0");
  const int required = required_dimension(scheme, n, d, coupling);
  if (source.dimension() < required) {
    fail(ErrorKind::dimension_overflow, "point source has dimension " + std::to_string(source.dimension()) +
                                            ", path needs " + std::to_string(required));
  }
  uniforms.resize(static_cast<std::size_t>(source.dimension()));
  source.fill(path_index, uniforms);

  out.lambda.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) out.lambda[static_cast<std::size_t>(j)] = uniforms[static_cast<std::size_t>(j)] >= 0.5;

  const auto& thetas = scheme.thetas();
  out.z.resize(thetas.size());
  std::size_t offset = static_cast<std::size_t>(n);
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    auto& level = out.z[k];
    level.theta = thetas[k];
    level.rows = d + 1;
    level.cols = thetas[k] * n;
    level.values.resize(static_cast<std::size_t>(level.rows * level.cols));
    const double dt = horizon / (static_cast<double>(n) * thetas[k]);
    const double scale = std::sqrt(dt);
    const std::size_t base = coupling == Coupling::reuse ? static_cast<std::size_t>(n) : offset;
    std::size_t u = base;
    for (int col = 0; col < level.cols; ++col) {
      level.at(0, col) = dt;
      for (int row = 1; row <= d; ++row) level.at(row, col) = scale * gaussian_inverse_cdf(uniforms[u++]);
    }
    offset += static_cast<std::size_t>(d * level.cols);
  }
}

PathRandomness draw_path_randomness(const PointSource& source, std::uint64_t path_index, const SchemeSpec& scheme,
                                    int n, int d, double horizon, Coupling coupling) {
  PathRandomness out;
  std::vector<double> uniforms;
  draw_path_randomness(source, path_index, scheme, n, d, horizon, coupling, out, uniforms);
  return out;
}

}  // namespace sdefw
