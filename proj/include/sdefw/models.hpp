#pragma once

// Concrete Stratonovich SDEs dX = V_0(X) dt + sum_i V_i(X) o dB^i.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdefw/ode_flows.hpp"

namespace sdefw {

using Payoff = std::function<double(std::span<const double> x)>;

struct SdeModel {
  std::string name;
  /// State dimension N.
  int dimension = 0;
  /// Number of Brownian drivers d; fields and flows hold d + 1 entries.
  int noise_dimension = 0;
  std::vector<VectorField> fields;
  std::vector<FlowMap> flows;
  Payoff payoff;
  std::function<bool(std::span<const double> x)> admissible;
  State x0;
  double horizon = 1.0;
  std::map<std::string, double> params;
  /// E[payoff(X_T)] when known in closed form.
  std::optional<double> exact_expectation;

  bool all_flows_exact() const;
};

struct HestonParams {
  double mu = 0.05;
  double alpha = 2.0;
  double theta_vol = 0.09;
  double beta = 0.1;
  double rho = 0.0;
  double x1 = 1.0;
  double x2 = 0.09;
  double T = 1.0;
  double K = 1.05;

  /// Requires x1, x2, T > 0, |rho| <= 1 and 2 alpha theta_vol - beta^2 > 0.
  void validate() const;
};

/// V_0 = (y1 (mu - y2/2 - rho beta/4), alpha (theta_vol - y2) - beta^2/4, y1),
/// V_1 = (y1 sqrt(y2), rho beta sqrt(y2), 0), V_2 = (0, beta sqrt((1-rho^2) y2), 0).
/// V_1 and V_2 throw inadmissible_state for y2 <= 0.
std::vector<VectorField> heston_vector_fields(const HestonParams& p);

/// Closed-form flows of V_1 and V_2 (rho = 0 only). A negative sqrt(x2) + beta t/2
/// is clamped to zero and reported through the return flag.
std::vector<FlowMap::ExactFlow> heston_exact_flows(const HestonParams& p);

double asian_call_payoff(std::span<const double> x, double T, double K);

/// Heston with the running integral of y1 as third coordinate. V_0 is integrated
/// by the given tableau; V_1, V_2 use closed forms when rho = 0 and the tableau otherwise.
SdeModel heston_model(const HestonParams& p, std::shared_ptr<const ButcherTableau> tableau, int drift_steps = 1);

/// GBM with Ito drift mu: V_0 = (mu - sigma^2/2) x, V_1 = sigma x; payoff x^power.
struct GbmParams {
  double mu = 0.05;
  double sigma = 0.2;
  double x0 = 1.0;
  double T = 1.0;
  int power = 2;
};

/// E[X_T^p] = x0^p exp(p mu T + p (p - 1) sigma^2 T / 2).
double gbm_moment(const GbmParams& p, int power);
SdeModel gbm_model(const GbmParams& p);

/// Ornstein-Uhlenbeck dX = -lambda X dt + sigma dB: V_0 = -lambda x, V_1 = sigma.
/// The two fields do not commute, so splitting schemes carry a genuine bias.
struct OuParams {
  double lambda = 1.0;
  double sigma = 0.5;
  double x0 = 1.0;
  double T = 1.0;
  int power = 2;
};

/// Closed-form E[X_T] and E[X_T^2].
double ou_moment(const OuParams& p, int power);
SdeModel ou_model(const OuParams& p);

std::vector<std::string> model_names();
/// Builds a registered model from named numeric parameters; unknown keys are
/// a parameter error. The Heston drift uses the named shipped tableau.
SdeModel make_model(const std::string& name, const std::map<std::string, double>& params,
                    const std::string& tableau = "fehlberg7");
/// Parameter names accepted by make_model for the given model.
std::vector<std::string> model_parameter_names(const std::string& name);

}  // namespace sdefw
