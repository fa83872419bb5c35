#ifndef SDEFW_SDEFW_H
#define SDEFW_SDEFW_H

/* C interface to the weak-approximation toolkit. Every function returns a
 * status code; on failure sdefw_last_error() describes the problem for the
 * calling thread. Strings returned through char** are owned by the caller and
 * released with sdefw_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(SDEFW_BUILDING_LIBRARY)
#define SDEFW_API __attribute__((visibility("default")))
#else
#define SDEFW_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sdefw_status {
  SDEFW_OK = 0,
  SDEFW_E_PARAMETER = 1,
  SDEFW_E_DOMAIN = 2,
  SDEFW_E_SINGULAR = 3,
  SDEFW_E_NUMERIC = 4,
  SDEFW_E_INADMISSIBLE = 5,
  SDEFW_E_INCONCLUSIVE = 6,
  SDEFW_E_DIMENSION = 7,
  SDEFW_E_BUDGET = 8,
  SDEFW_E_ESTIMATION = 9,
  SDEFW_E_IO = 10,
  SDEFW_E_USAGE = 11,
  SDEFW_E_INTERNAL = 12
} sdefw_status;

typedef struct sdefw_config sdefw_config;
typedef struct sdefw_study sdefw_study;
typedef struct sdefw_scheme sdefw_scheme;
typedef struct sdefw_model sdefw_model;

SDEFW_API const char* sdefw_version(void);
SDEFW_API const char* sdefw_status_name(sdefw_status status);
/* Message of the last failed call on this thread, or "" */
SDEFW_API const char* sdefw_last_error(void);
SDEFW_API void sdefw_string_free(char* s);

/* Study configuration (flat key = value text). */
SDEFW_API sdefw_status sdefw_config_load(const char* path, sdefw_config** out);
SDEFW_API sdefw_status sdefw_config_parse(const char* text, sdefw_config** out);
/* Applies one "key=value" override. */
SDEFW_API sdefw_status sdefw_config_set(sdefw_config* config, const char* assignment);
SDEFW_API sdefw_status sdefw_config_serialize(const sdefw_config* config, char** out);
/* Output path from the config; empty string when unset. */
SDEFW_API sdefw_status sdefw_config_output(const sdefw_config* config, char** out);
SDEFW_API void sdefw_config_free(sdefw_config* config);

SDEFW_API sdefw_status sdefw_run_study(const sdefw_config* config, int workers, sdefw_study** out);
SDEFW_API sdefw_status sdefw_study_csv(const sdefw_study* study, char** out);
SDEFW_API sdefw_status sdefw_study_summary(const sdefw_study* study, char** out);
/* log10(n), log10(error) columns per scheme; warnings go to *warnings. */
SDEFW_API sdefw_status sdefw_study_plotdata(const sdefw_study* study, char** out, char** warnings);
/* 1 when every algebra check passed (always 1 for sampling studies). */
SDEFW_API int sdefw_study_all_pass(const sdefw_study* study);
SDEFW_API void sdefw_study_free(sdefw_study* study);

/* Exact order-condition suite for theta = (1..m); degree <= 0 means 2m. */
SDEFW_API sdefw_status sdefw_verify_algebra(int m, int d, int degree, char** report, int* all_pass);

/* Extrapolation schemes. */
SDEFW_API sdefw_status sdefw_scheme_create(const int* thetas, size_t count, sdefw_scheme** out);
SDEFW_API size_t sdefw_scheme_levels(const sdefw_scheme* scheme);
SDEFW_API sdefw_status sdefw_scheme_weights(const sdefw_scheme* scheme, double* weights, size_t count);
/* Weight i as an exact fraction "p/q". */
SDEFW_API sdefw_status sdefw_scheme_weight_fraction(const sdefw_scheme* scheme, size_t index, char** out);
SDEFW_API void sdefw_scheme_free(sdefw_scheme* scheme);

/* Models by registry name ("heston", "gbm", "ou") with optional overrides. */
SDEFW_API sdefw_status sdefw_model_create(const char* name, const char* const* keys, const double* values,
                                          size_t count, sdefw_model** out);
SDEFW_API void sdefw_model_free(sdefw_model* model);

/* Extrapolated estimate with M paths; rng is "pseudo:<seed>" or "sobol[:skip]". */
SDEFW_API sdefw_status sdefw_estimate(const sdefw_model* model, const sdefw_scheme* scheme, int n, uint64_t M,
                                      const char* rng, int workers, double* value, double* standard_error);

/* M (5m + n((d+1)a + Z + 1) sum(theta) + nB + 1) + 2m. */
SDEFW_API sdefw_status sdefw_cost_estimate(const sdefw_scheme* scheme, int n, uint64_t M, int d, double a,
                                           double B, double Z, double* out);

#ifdef __cplusplus
}
#endif

#endif /* SDEFW_SDEFW_H */
