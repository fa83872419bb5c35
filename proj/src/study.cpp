#include "sdefw/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sdefw/error.hpp"
#include "sdefw/models.hpp"
#include "sdefw/scheme_engine.hpp"

namespace sdefw {

namespace {

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
  fail(ErrorKind::usage, "config key '" + key + "': " + why);
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    bad_key(key, "expected a number, got '" + value + "'");
  }
}

long long parse_integer(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    bad_key(key, "expected an integer, got '" + value + "'");
  }
}

std::uint64_t parse_count(const std::string& key, const std::string& value) {
  // Accept 1e6 style sample counts as long as they are exact integers.
  const double v = parse_double(key, value);
  if (!(v >= 1) || v != std::floor(v) || v > 9.0e15) bad_key(key, "expected a positive integer, got '" + value + "'");
  return static_cast<std::uint64_t>(v);
}

std::string join_ints(const std::vector<int>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + std::to_string(v[i]);
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string optional_g17(const std::optional<double>& v) { return v ? g17(*v) : std::string(); }

std::string scheme_name(const StudyRow& row) {
  return row.level_theta == 0 ? row.scheme : row.scheme + "/theta=" + std::to_string(row.level_theta);
}

std::string format_row(const StudyRow& row, bool with_timing) {
  std::ostringstream os;
  char elapsed[32] = "";
  if (with_timing && row.elapsed_s) std::snprintf(elapsed, sizeof elapsed, "%.3f", *row.elapsed_s);
  os << csv_field(row.model) << ',' << csv_field(scheme_name(row)) << ',' << row.n << ','
     << (row.M == 0 ? std::string() : std::to_string(row.M)) << ',' << csv_field(row.rng) << ',' << g17(row.E) << ','
     << optional_g17(row.standard_error) << ',' << elapsed << ',' << optional_g17(row.op_count) << ','
     << optional_g17(row.abs_error) << '\n';
  return os.str();
}

bool is_model_key(const std::string& key) {
  for (const auto& model : model_names()) {
    const auto names = model_parameter_names(model);
    if (std::find(names.begin(), names.end(), key) != names.end()) return true;
  }
  return false;
}

}  // namespace

const char* to_string(StudyMode mode) noexcept {
  switch (mode) {
    case StudyMode::mc: return "mc";
    case StudyMode::qmc: return "qmc";
    case StudyMode::quadrature_oracle: return "quadrature-oracle";
    case StudyMode::algebra_verify: return "algebra-verify";
  }
  return "?";
}

StudyMode parse_study_mode(const std::string& text) {
  if (text == "mc") return StudyMode::mc;
  if (text == "qmc") return StudyMode::qmc;
  if (text == "quadrature-oracle") return StudyMode::quadrature_oracle;
  if (text == "algebra-verify") return StudyMode::algebra_verify;
  bad_key("mode", "expected mc, qmc, quadrature-oracle or algebra-verify, got '" + text + "'");
}

void StudyConfig::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) fail(ErrorKind::usage, "expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void StudyConfig::set(const std::string& key, const std::string& value) {
  if (key == "mode") {
    mode = parse_study_mode(value);
  } else if (key == "model") {
    model = value;
  } else if (key == "schemes") {
    schemes.clear();
    for (const auto& item : split(value, ';')) {
      if (item.empty()) continue;
      try {
        schemes.push_back(parse_thetas(item));
      } catch (const Error& e) {
        bad_key(key, e.what());
      }
    }
    if (schemes.empty()) bad_key(key, "no scheme given");
  } else if (key == "n") {
    n_values.clear();
    for (const auto& item : split(value, ',')) n_values.push_back(static_cast<int>(parse_integer(key, item)));
  } else if (key == "M") {
    M = parse_count(key, value);
  } else if (key == "rng") {
    rng = value;
  } else if (key == "coupling") {
    coupling = value;
  } else if (key == "tableau") {
    tableau = value;
  } else if (key == "reference") {
    if (value == "none") {
      reference.reset();
      reference_disabled = true;
    } else if (value.empty()) {
      reference.reset();
      reference_disabled = false;
    } else {
      reference = parse_double(key, value);
      reference_disabled = false;
    }
  } else if (key == "output") {
    output = value;
  } else if (key == "nodes") {
    quadrature_nodes = static_cast<int>(parse_integer(key, value));
  } else if (key == "prune_ratio") {
    prune_ratio = parse_double(key, value);
  } else if (key == "block_size") {
    block_size = static_cast<std::size_t>(parse_count(key, value));
  } else if (key == "m") {
    algebra_m = static_cast<int>(parse_integer(key, value));
  } else if (key == "d") {
    algebra_d = static_cast<int>(parse_integer(key, value));
  } else if (key == "degree") {
    algebra_degree = static_cast<int>(parse_integer(key, value));
  } else if (is_model_key(key)) {
    model_params[key] = parse_double(key, value);
  } else {
    bad_key(key, "unknown key");
  }
}

StudyConfig StudyConfig::parse(const std::string& text) {
  StudyConfig config;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    config.set(line);
  }
  return config;
}

StudyConfig StudyConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string StudyConfig::serialize() const {
  std::ostringstream os;
  os << "mode = " << to_string(mode) << '\n';
  os << "model = " << model << '\n';
  for (const auto& [key, value] : model_params) os << key << " = " << g17(value) << '\n';
  os << "schemes = ";
  for (std::size_t i = 0; i < schemes.size(); ++i) os << (i ? ";" : "") << join_ints(schemes[i], ',');
  os << '\n';
  os << "n = " << join_ints(n_values, ',') << '\n';
  os << "M = " << M << '\n';
  os << "rng = " << rng << '\n';
  os << "coupling = " << coupling << '\n';
  os << "tableau = " << tableau << '\n';
  os << "reference = " << (reference_disabled ? std::string("none") : reference ? g17(*reference) : std::string())
     << '\n';
  os << "output = " << output << '\n';
  os << "nodes = " << quadrature_nodes << '\n';
  os << "prune_ratio = " << g17(prune_ratio) << '\n';
  os << "block_size = " << block_size << '\n';
  os << "m = " << algebra_m << '\n';
  os << "d = " << algebra_d << '\n';
  os << "degree = " << algebra_degree << '\n';
  return os.str();
}

void StudyConfig::validate() const {
  if (mode == StudyMode::algebra_verify) {
    if (algebra_m < 1) bad_key("m", "must be at least 1");
    if (algebra_d < 0) bad_key("d", "must be nonnegative");
    return;
  }
  const auto names = model_names();
  if (std::find(names.begin(), names.end(), model) == names.end()) bad_key("model", "unknown model '" + model + "'");
  const auto params = model_parameter_names(model);
  for (const auto& [key, value] : model_params) {
    if (std::find(params.begin(), params.end(), key) == params.end()) {
      bad_key(key, "not a parameter of model " + model);
    }
  }
  if (schemes.empty()) bad_key("schemes", "no scheme given");
  if (n_values.empty()) bad_key("n", "no partition count given");
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (n_values[i] < 1) bad_key("n", "values must be positive");
    if (i > 0 && n_values[i] <= n_values[i - 1]) bad_key("n", "values must be increasing");
  }
  try {
    parse_coupling(coupling);
  } catch (const Error& e) {
    bad_key("coupling", e.what());
  }
  if (mode == StudyMode::mc && !rng.empty() && rng.rfind("pseudo", 0) != 0) {
    bad_key("rng", "mode mc needs a pseudo:<seed> generator");
  }
  if (mode == StudyMode::qmc && !rng.empty() && rng.rfind("sobol", 0) != 0) {
    bad_key("rng", "mode qmc needs the sobol generator");
  }
  if (mode == StudyMode::quadrature_oracle) {
    if (model == "heston") bad_key("model", "quadrature-oracle mode needs a model with one Brownian driver");
    if (quadrature_nodes < 16) bad_key("nodes", "quadrature-oracle mode needs at least 16 nodes");
    for (const auto& thetas : schemes) {
      for (int n : n_values) {
        if (static_cast<long long>(thetas.back()) * n > 8) {
          bad_key("n", "quadrature-oracle mode needs theta_max * n <= 8");
        }
      }
    }
  }
}

std::string StudyResult::csv_header() { return "model,scheme,n,M,rng,E,stderr,elapsed_s,op_count,abs_error"; }

std::string StudyResult::csv() const {
  std::string out = csv_header() + "\n";
  for (const auto& row : rows) out += format_row(row, true);
  return out;
}

std::string StudyResult::csv_without_timing() const {
  std::string out = csv_header() + "\n";
  for (const auto& row : rows) out += format_row(row, false);
  return out;
}

std::string StudyResult::summary() const {
  std::ostringstream os;
  if (verification) {
    os << verification->format();
    os << "RESULT " << (verification->all_pass() ? "PASS" : "FAIL") << '\n';
    return os.str();
  }
  for (const auto& s : slopes) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "SLOPE %s %.4f points=%d\n", s.scheme.c_str(), s.slope, s.points);
    os << buf;
  }
  for (const auto& w : warnings) os << "WARNING " << w << '\n';
  return os.str();
}

bool StudyResult::all_pass() const { return !verification || verification->all_pass(); }

StudyResult run_study(const StudyConfig& config, int workers) {
  config.validate();
  StudyResult result;
  result.mode = config.mode;
  if (config.mode == StudyMode::algebra_verify) {
    result.verification = algebra::verify_algebra(config.algebra_m, config.algebra_d, config.algebra_degree);
    return result;
  }

  const SdeModel model = make_model(config.model, config.model_params, config.tableau);
  std::optional<double> reference = config.reference;
  if (!reference && !config.reference_disabled) {
    if (!model.exact_expectation) {
      bad_key("reference", "reference value missing (set a value, or `none` to skip errors)");
    }
    reference = model.exact_expectation;
  }
  const Coupling coupling = parse_coupling(config.coupling);

  for (const auto& thetas : config.schemes) {
    const SchemeSpec scheme = solve_weights(thetas);
    for (int n : config.n_values) {
      StudyRow row;
      row.model = model.name;
      row.scheme = scheme.label();
      row.n = n;
      std::vector<StudyRow> levels;
      if (config.mode == StudyMode::quadrature_oracle) {
        QuadratureOptions options;
        options.nodes = config.quadrature_nodes;
        options.prune_ratio = config.prune_ratio;
        const auto start = std::chrono::steady_clock::now();
        const QuadratureResult q = quadrature_expectation(model, scheme, n, options);
        row.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        row.rng = "gauss-hermite:" + std::to_string(config.quadrature_nodes);
        row.E = q.extrapolated;
        row.op_count = static_cast<double>(q.evaluations);
        if (q.neglected_weight > 1e-8) {
          result.warnings.push_back(row.scheme + " n=" + std::to_string(n) + ": pruned probability mass " +
                                    g17(q.neglected_weight));
        }
        for (std::size_t k = 0; k < thetas.size(); ++k) {
          StudyRow level = row;
          level.level_theta = thetas[k];
          level.E = q.level_expectations[k];
          level.elapsed_s.reset();
          level.op_count.reset();
          levels.push_back(level);
        }
      } else {
        const std::string rng_spec =
            !config.rng.empty() ? config.rng : (config.mode == StudyMode::qmc ? "sobol" : "pseudo:1");
        const PointSource source =
            PointSource::parse(rng_spec, required_dimension(scheme, n, model.noise_dimension, coupling));
        EstimateOptions options;
        options.workers = workers;
        options.coupling = coupling;
        options.block_size = config.block_size;
        const EstimateReport report = estimate(model, scheme, n, config.M, source, options);
        row.M = config.M;
        row.rng = report.rng;
        row.E = report.E;
        row.standard_error = report.standard_error;
        row.elapsed_s = report.elapsed_s;
        row.op_count = report.op_count;
        if (report.aborted_paths + report.clamped_paths > 0) {
          result.warnings.push_back(row.scheme + " n=" + std::to_string(n) + ": " +
                                    std::to_string(report.aborted_paths) + " aborted, " +
                                    std::to_string(report.clamped_paths) + " clamped paths");
        }
        for (const auto& l : report.levels) {
          StudyRow level = row;
          level.level_theta = l.theta;
          level.E = l.mean;
          level.standard_error = l.standard_error;
          level.elapsed_s.reset();
          level.op_count.reset();
          levels.push_back(level);
        }
      }
      if (reference) {
        row.abs_error = std::fabs(row.E - *reference);
        for (auto& level : levels) level.abs_error = std::fabs(level.E - *reference);
      }
      result.rows.push_back(row);
      for (auto& level : levels) result.rows.push_back(level);
    }
  }

  if (reference) {
    std::vector<std::string> order;
    for (const auto& row : result.rows) {
      if (row.level_theta == 0 && std::find(order.begin(), order.end(), row.scheme) == order.end()) {
        order.push_back(row.scheme);
      }
    }
    for (const auto& scheme : order) {
      std::vector<double> ns, errs;
      for (const auto& row : result.rows) {
        if (row.level_theta == 0 && row.scheme == scheme && row.abs_error && *row.abs_error > 0) {
          ns.push_back(row.n);
          errs.push_back(*row.abs_error);
        }
      }
      if (ns.size() < 2) {
        result.warnings.push_back("scheme " + scheme + ": fewer than 2 n values with nonzero error, no slope fitted");
        continue;
      }
      result.slopes.push_back({scheme, loglog_slope(ns, errs), static_cast<int>(ns.size())});
    }
  }
  return result;
}

std::vector<PlotPoint> plot_points(const StudyResult& result) {
  std::vector<PlotPoint> points;
  for (const auto& row : result.rows) {
    if (row.level_theta == 0 && row.abs_error) points.push_back({row.scheme, row.n, *row.abs_error});
  }
  return points;
}

PlotData emit_plotdata(const std::vector<PlotPoint>& table) {
  PlotData out;
  std::vector<std::string> order;
  for (const auto& p : table) {
    if (std::find(order.begin(), order.end(), p.scheme) == order.end()) order.push_back(p.scheme);
  }
  std::ostringstream os;
  for (const auto& scheme : order) {
    std::vector<double> ns, errs;
    for (const auto& p : table) {
      if (p.scheme == scheme && p.n > 0 && p.error > 0) {
        ns.push_back(p.n);
        errs.push_back(p.error);
      }
    }
    if (ns.size() < 2) {
      out.warnings.push_back("scheme " + scheme + ": fewer than 2 points, skipped");
      continue;
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "# scheme %s slope %.2f\n", scheme.c_str(), loglog_slope(ns, errs));
    os << buf << "log10_n log10_error\n";
    for (std::size_t i = 0; i < ns.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.6f %.6f\n", std::log10(ns[i]), std::log10(errs[i]));
      os << buf;
    }
    os << '\n';
  }
  out.text = os.str();
  return out;
}

}  // namespace sdefw
