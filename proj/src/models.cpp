#include "sdefw/models.hpp"

#include <algorithm>
#include <cmath>

#include "sdefw/error.hpp"

namespace sdefw {

namespace {

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

double require_positive_variance(double y2) {
  if (!(y2 > 0.0)) fail(ErrorKind::inadmissible_state, "variance must be positive, got " + std::to_string(y2));
  return std::sqrt(y2);
}

double integer_pow(double x, int power) { return power == 1 ? x : x * x; }

void check_power(int power) {
  if (power != 1 && power != 2) fail(ErrorKind::parameter, "closed-form moments exist for power 1 and 2 only");
}

double lookup(const std::map<std::string, double>& params, const char* key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

int integer_power(double value) {
  if (value != std::floor(value)) fail(ErrorKind::parameter, "power must be an integer");
  return static_cast<int>(value);
}

void reject_unknown(const std::string& model, const std::map<std::string, double>& params) {
  const auto known = model_parameter_names(model);
  for (const auto& [key, value] : params) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      fail(ErrorKind::parameter, "model " + model + " has no parameter '" + key + "'");
    }
  }
}

}  // namespace

bool SdeModel::all_flows_exact() const {
  return std::all_of(flows.begin(), flows.end(), [](const FlowMap& f) { return f.is_exact(); });
}

void HestonParams::validate() const {
  if (!(x1 > 0 && x2 > 0)) fail(ErrorKind::parameter, "Heston initial state needs x1 > 0 and x2 > 0");
  if (!(T > 0)) fail(ErrorKind::parameter, "Heston horizon T must be positive");
  if (!(std::fabs(rho) <= 1)) fail(ErrorKind::parameter, "Heston correlation needs |rho| <= 1");
  if (!(beta >= 0)) fail(ErrorKind::parameter, "Heston beta must be nonnegative");
  if (!(2 * alpha * theta_vol - beta * beta > 0)) {
    fail(ErrorKind::parameter, "Feller condition 2 alpha theta_vol - beta^2 > 0 violated");
  }
}

std::vector<VectorField> heston_vector_fields(const HestonParams& p) {
  p.validate();
  std::vector<VectorField> v;
  v.emplace_back([p](std::span<const double> y, std::span<double> out) {
    out[0] = y[0] * (p.mu - y[1] / 2 - p.rho * p.beta / 4);
    out[1] = p.alpha * (p.theta_vol - y[1]) - p.beta * p.beta / 4;
    out[2] = y[0];
  });
  v.emplace_back([p](std::span<const double> y, std::span<double> out) {
    const double s = require_positive_variance(y[1]);
    out[0] = y[0] * s;
    out[1] = p.rho * p.beta * s;
    out[2] = 0;
  });
  v.emplace_back([p](std::span<const double> y, std::span<double> out) {
    const double s = require_positive_variance(y[1]);
    out[0] = 0;
    out[1] = p.beta * std::sqrt(1 - p.rho * p.rho) * s;
    out[2] = 0;
  });
  return v;
}

std::vector<FlowMap::ExactFlow> heston_exact_flows(const HestonParams& p) {
  p.validate();
  if (p.rho != 0) fail(ErrorKind::parameter, "closed-form Heston diffusion flows need rho = 0");
  std::vector<FlowMap::ExactFlow> flows;
  flows.emplace_back([](double t, std::span<double> x) {
    if (x[1] < 0) fail(ErrorKind::inadmissible_state, "negative variance entering V1 flow");
    x[0] *= std::exp(t * std::sqrt(x[1]));
    return false;
  });
  flows.emplace_back([beta = p.beta](double t, std::span<double> x) {
    if (x[1] < 0) fail(ErrorKind::inadmissible_state, "negative variance entering V2 flow");
    const double root = beta * t / 2 + std::sqrt(x[1]);
    if (root < 0) {
      x[1] = 0;
      return true;
    }
    x[1] = root * root;
    return false;
  });
  return flows;
}

double asian_call_payoff(std::span<const double> x, double T, double K) { return std::max(x[2] / T - K, 0.0); }

SdeModel heston_model(const HestonParams& p, std::shared_ptr<const ButcherTableau> tableau, int drift_steps) {
  p.validate();
  SdeModel m;
  m.name = "heston";
  m.dimension = 3;
  m.noise_dimension = 2;
  m.fields = heston_vector_fields(p);
  m.flows.push_back(FlowMap::numeric(tableau, m.fields[0], drift_steps));
  if (p.rho == 0) {
    for (auto& f : heston_exact_flows(p)) m.flows.push_back(FlowMap::exact(std::move(f)));
  } else {
    m.flows.push_back(FlowMap::numeric(tableau, m.fields[1], drift_steps));
    m.flows.push_back(FlowMap::numeric(tableau, m.fields[2], drift_steps));
  }
  m.payoff = [T = p.T, K = p.K](std::span<const double> x) { return asian_call_payoff(x, T, K); };
  m.admissible = [](std::span<const double> x) { return all_finite(x) && x[1] > 0; };
  m.x0 = {p.x1, p.x2, 0.0};
  m.horizon = p.T;
  m.params = {{"mu", p.mu},   {"alpha", p.alpha}, {"theta_vol", p.theta_vol},
              {"beta", p.beta}, {"rho", p.rho},   {"x1", p.x1},
              {"x2", p.x2},   {"T", p.T},         {"K", p.K}};
  return m;
}

double gbm_moment(const GbmParams& p, int power) {
  check_power(power);
  return std::pow(p.x0, power) *
         std::exp(power * p.mu * p.T + power * (power - 1) * p.sigma * p.sigma * p.T / 2);
}

SdeModel gbm_model(const GbmParams& p) {
  if (!(p.sigma >= 0)) fail(ErrorKind::parameter, "GBM needs sigma >= 0");
  if (!(p.T > 0)) fail(ErrorKind::parameter, "GBM horizon T must be positive");
  check_power(p.power);
  const double drift = p.mu - p.sigma * p.sigma / 2;
  SdeModel m;
  m.name = "gbm";
  m.dimension = 1;
  m.noise_dimension = 1;
  m.fields.emplace_back([drift](std::span<const double> x, std::span<double> out) { out[0] = drift * x[0]; });
  m.fields.emplace_back([s = p.sigma](std::span<const double> x, std::span<double> out) { out[0] = s * x[0]; });
  m.flows.push_back(FlowMap::exact([drift](double t, std::span<double> x) {
    x[0] *= std::exp(drift * t);
    return false;
  }));
  m.flows.push_back(FlowMap::exact([s = p.sigma](double z, std::span<double> x) {
    x[0] *= std::exp(s * z);
    return false;
  }));
  m.payoff = [power = p.power](std::span<const double> x) { return integer_pow(x[0], power); };
  m.admissible = [](std::span<const double> x) { return all_finite(x); };
  m.x0 = {p.x0};
  m.horizon = p.T;
  m.params = {{"mu", p.mu}, {"sigma", p.sigma}, {"x0", p.x0}, {"T", p.T}, {"power", p.power}};
  m.exact_expectation = gbm_moment(p, p.power);
  return m;
}

double ou_moment(const OuParams& p, int power) {
  check_power(power);
  const double decay = std::exp(-p.lambda * p.T);
  const double mean = p.x0 * decay;
  if (power == 1) return mean;
  const double variance = p.lambda == 0 ? p.sigma * p.sigma * p.T
                                        : p.sigma * p.sigma * (1 - decay * decay) / (2 * p.lambda);
  return mean * mean + variance;
}

SdeModel ou_model(const OuParams& p) {
  if (!(p.sigma >= 0)) fail(ErrorKind::parameter, "OU needs sigma >= 0");
  if (!(p.T > 0)) fail(ErrorKind::parameter, "OU horizon T must be positive");
  check_power(p.power);
  SdeModel m;
  m.name = "ou";
  m.dimension = 1;
  m.noise_dimension = 1;
  m.fields.emplace_back([l = p.lambda](std::span<const double> x, std::span<double> out) { out[0] = -l * x[0]; });
  m.fields.emplace_back([s = p.sigma](std::span<const double>, std::span<double> out) { out[0] = s; });
  m.flows.push_back(FlowMap::exact([l = p.lambda](double t, std::span<double> x) {
    x[0] *= std::exp(-l * t);
    return false;
  }));
  m.flows.push_back(FlowMap::exact([s = p.sigma](double z, std::span<double> x) {
    x[0] += s * z;
    return false;
  }));
  m.payoff = [power = p.power](std::span<const double> x) { return integer_pow(x[0], power); };
  m.admissible = [](std::span<const double> x) { return all_finite(x); };
  m.x0 = {p.x0};
  m.horizon = p.T;
  m.params = {{"lambda", p.lambda}, {"sigma", p.sigma}, {"x0", p.x0}, {"T", p.T}, {"power", p.power}};
  m.exact_expectation = ou_moment(p, p.power);
  return m;
}

std::vector<std::string> model_names() { return {"heston", "gbm", "ou"}; }

std::vector<std::string> model_parameter_names(const std::string& name) {
  if (name == "heston") return {"mu", "alpha", "theta_vol", "beta", "rho", "x1", "x2", "T", "K"};
  if (name == "gbm") return {"mu", "sigma", "x0", "T", "power"};
  if (name == "ou") return {"lambda", "sigma", "x0", "T", "power"};
  fail(ErrorKind::parameter, "unknown model '" + name + "' (expected heston, gbm or ou)");
}

SdeModel make_model(const std::string& name, const std::map<std::string, double>& params, const std::string& tableau) {
  reject_unknown(name, params);
  if (name == "heston") {
    HestonParams p;
    p.mu = lookup(params, "mu", p.mu);
    p.alpha = lookup(params, "alpha", p.alpha);
    p.theta_vol = lookup(params, "theta_vol", p.theta_vol);
    p.beta = lookup(params, "beta", p.beta);
    p.rho = lookup(params, "rho", p.rho);
    p.x1 = lookup(params, "x1", p.x1);
    p.x2 = lookup(params, "x2", p.x2);
    p.T = lookup(params, "T", p.T);
    p.K = lookup(params, "K", p.K);
    return heston_model(p, shipped_tableau(tableau));
  }
  if (name == "gbm") {
    GbmParams p;
    p.mu = lookup(params, "mu", p.mu);
    p.sigma = lookup(params, "sigma", p.sigma);
    p.x0 = lookup(params, "x0", p.x0);
    p.T = lookup(params, "T", p.T);
    p.power = integer_power(lookup(params, "power", p.power));
    return gbm_model(p);
  }
  OuParams p;
  p.lambda = lookup(params, "lambda", p.lambda);
  p.sigma = lookup(params, "sigma", p.sigma);
  p.x0 = lookup(params, "x0", p.x0);
  p.T = lookup(params, "T", p.T);
  p.power = integer_power(lookup(params, "power", p.power));
  return ou_model(p);
}

}  // namespace sdefw
