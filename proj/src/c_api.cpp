#include "sdefw/sdefw.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "sdefw/algebra_checks.hpp"
#include "sdefw/error.hpp"
#include "sdefw/scheme_engine.hpp"
#include "sdefw/study.hpp"

struct sdefw_config {
  sdefw::StudyConfig value;
};

struct sdefw_study {
  sdefw::StudyResult value;
};

struct sdefw_scheme {
  sdefw::SchemeSpec value;
};

struct sdefw_model {
  sdefw::SdeModel value;
};

namespace {

thread_local std::string last_error;

sdefw_status status_of(sdefw::ErrorKind kind) {
  using sdefw::ErrorKind;
  switch (kind) {
    case ErrorKind::parameter: return SDEFW_E_PARAMETER;
    case ErrorKind::domain: return SDEFW_E_DOMAIN;
    case ErrorKind::singular: return SDEFW_E_SINGULAR;
    case ErrorKind::numeric_failure: return SDEFW_E_NUMERIC;
    case ErrorKind::inadmissible_state: return SDEFW_E_INADMISSIBLE;
    case ErrorKind::inconclusive: return SDEFW_E_INCONCLUSIVE;
    case ErrorKind::dimension_overflow: return SDEFW_E_DIMENSION;
    case ErrorKind::budget: return SDEFW_E_BUDGET;
    case ErrorKind::estimation: return SDEFW_E_ESTIMATION;
    case ErrorKind::io: return SDEFW_E_IO;
    case ErrorKind::usage: return SDEFW_E_USAGE;
  }
  return SDEFW_E_INTERNAL;
}

template <typename F>
sdefw_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return SDEFW_OK;
  } catch (const sdefw::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SDEFW_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SDEFW_E_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return SDEFW_E_INTERNAL;
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (p == nullptr) sdefw::fail(sdefw::ErrorKind::parameter, std::string(what) + " must not be null");
}

}  // namespace

extern "C" {

const char* sdefw_version(void) { return "1.0.0"; }

const char* sdefw_status_name(sdefw_status status) {
  switch (status) {
    case SDEFW_OK: return "ok";
    case SDEFW_E_PARAMETER: return "parameter";
    case SDEFW_E_DOMAIN: return "domain";
    case SDEFW_E_SINGULAR: return "singular";
    case SDEFW_E_NUMERIC: return "numeric_failure";
    case SDEFW_E_INADMISSIBLE: return "inadmissible_state";
    case SDEFW_E_INCONCLUSIVE: return "inconclusive";
    case SDEFW_E_DIMENSION: return "dimension_overflow";
    case SDEFW_E_BUDGET: return "budget";
    case SDEFW_E_ESTIMATION: return "estimation";
    case SDEFW_E_IO: return "io";
    case SDEFW_E_USAGE: return "usage";
    case SDEFW_E_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* sdefw_last_error(void) { return last_error.c_str(); }

void sdefw_string_free(char* s) { std::free(s); }

sdefw_status sdefw_config_load(const char* path, sdefw_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new sdefw_config{sdefw::StudyConfig::load(path)};
  });
}

sdefw_status sdefw_config_parse(const char* text, sdefw_config** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new sdefw_config{sdefw::StudyConfig::parse(text)};
  });
}

sdefw_status sdefw_config_set(sdefw_config* config, const char* assignment) {
  return guarded([&] {
    require(config, "config");
    require(assignment, "assignment");
    config->value.set(assignment);
  });
}

sdefw_status sdefw_config_serialize(const sdefw_config* config, char** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = duplicate(config->value.serialize());
  });
}

sdefw_status sdefw_config_output(const sdefw_config* config, char** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = duplicate(config->value.output);
  });
}

void sdefw_config_free(sdefw_config* config) { delete config; }

sdefw_status sdefw_run_study(const sdefw_config* config, int workers, sdefw_study** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    if (workers < 1) sdefw::fail(sdefw::ErrorKind::usage, "workers must be at least 1");
    *out = new sdefw_study{sdefw::run_study(config->value, workers)};
  });
}

sdefw_status sdefw_study_csv(const sdefw_study* study, char** out) {
  return guarded([&] {
    require(study, "study");
    require(out, "out");
    *out = duplicate(study->value.verification ? study->value.verification->format() : study->value.csv());
  });
}

sdefw_status sdefw_study_summary(const sdefw_study* study, char** out) {
  return guarded([&] {
    require(study, "study");
    require(out, "out");
    *out = duplicate(study->value.summary());
  });
}

sdefw_status sdefw_study_plotdata(const sdefw_study* study, char** out, char** warnings) {
  return guarded([&] {
    require(study, "study");
    require(out, "out");
    const sdefw::PlotData plot = sdefw::emit_plotdata(sdefw::plot_points(study->value));
    std::string joined;
    for (const auto& w : plot.warnings) joined += w + "\n";
    *out = duplicate(plot.text);
    if (warnings != nullptr) *warnings = duplicate(joined);
  });
}

int sdefw_study_all_pass(const sdefw_study* study) { return study != nullptr && study->value.all_pass() ? 1 : 0; }

void sdefw_study_free(sdefw_study* study) { delete study; }

sdefw_status sdefw_verify_algebra(int m, int d, int degree, char** report, int* all_pass) {
  return guarded([&] {
    require(report, "report");
    const auto r = sdefw::algebra::verify_algebra(m, d, degree);
    *report = duplicate(r.format());
    if (all_pass != nullptr) *all_pass = r.all_pass() ? 1 : 0;
  });
}

sdefw_status sdefw_scheme_create(const int* thetas, size_t count, sdefw_scheme** out) {
  return guarded([&] {
    require(thetas, "thetas");
    require(out, "out");
    *out = new sdefw_scheme{sdefw::solve_weights(std::vector<int>(thetas, thetas + count))};
  });
}

size_t sdefw_scheme_levels(const sdefw_scheme* scheme) {
  return scheme == nullptr ? 0 : static_cast<size_t>(scheme->value.m());
}

sdefw_status sdefw_scheme_weights(const sdefw_scheme* scheme, double* weights, size_t count) {
  return guarded([&] {
    require(scheme, "scheme");
    require(weights, "weights");
    const auto w = scheme->value.weights_as_double();
    if (count < w.size()) sdefw::fail(sdefw::ErrorKind::parameter, "weight buffer too small");
    for (size_t i = 0; i < w.size(); ++i) weights[i] = w[i];
  });
}

sdefw_status sdefw_scheme_weight_fraction(const sdefw_scheme* scheme, size_t index, char** out) {
  return guarded([&] {
    require(scheme, "scheme");
    require(out, "out");
    if (index >= scheme->value.weights().size()) sdefw::fail(sdefw::ErrorKind::parameter, "weight index out of range");
    *out = duplicate(sdefw::format_fraction(scheme->value.weights()[index]));
  });
}

void sdefw_scheme_free(sdefw_scheme* scheme) { delete scheme; }

sdefw_status sdefw_model_create(const char* name, const char* const* keys, const double* values, size_t count,
                                sdefw_model** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    std::map<std::string, double> params;
    for (size_t i = 0; i < count; ++i) {
      require(keys, "keys");
      require(values, "values");
      require(keys[i], "key");
      params[keys[i]] = values[i];
    }
    *out = new sdefw_model{sdefw::make_model(name, params)};
  });
}

void sdefw_model_free(sdefw_model* model) { delete model; }

sdefw_status sdefw_estimate(const sdefw_model* model, const sdefw_scheme* scheme, int n, uint64_t M,
                            const char* rng, int workers, double* value, double* standard_error) {
  return guarded([&] {
    require(model, "model");
    require(scheme, "scheme");
    require(rng, "rng");
    require(value, "value");
    const int dim = sdefw::required_dimension(scheme->value, n, model->value.noise_dimension,
                                              sdefw::Coupling::independent);
    const auto source = sdefw::PointSource::parse(rng, dim);
    sdefw::EstimateOptions options;
    options.workers = workers;
    const auto report = sdefw::estimate(model->value, scheme->value, n, M, source, options);
    *value = report.E;
    if (standard_error != nullptr) *standard_error = report.standard_error;
  });
}

sdefw_status sdefw_cost_estimate(const sdefw_scheme* scheme, int n, uint64_t M, int d, double a, double B, double Z,
                                 double* out) {
  return guarded([&] {
    require(scheme, "scheme");
    require(out, "out");
    if (n < 0 || d < 0 || a < 0 || B < 0 || Z < 0) sdefw::fail(sdefw::ErrorKind::parameter, "inputs must be nonnegative");
    *out = sdefw::cost_estimate(scheme->value, n, M, d, a, B, Z);
  });
}

}  // extern "C"
