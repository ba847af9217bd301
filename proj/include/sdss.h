/* C API for the sdss controller-synthesis library.
 *
 * All entry points return an sdss_status code; results travel through opaque
 * handles. Strings returned via out-parameters are owned by the library and
 * released with sdss_string_free / sdss_result_free.
 */
#ifndef SDSS_H
#define SDSS_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sdss_status {
  SDSS_OK = 0,
  SDSS_ERROR_INVALID_ARGUMENT = 1,
  SDSS_ERROR_CONFIG = 2,
  SDSS_ERROR_RUNTIME = 3,
} sdss_status;

typedef struct sdss_config sdss_config;
typedef struct sdss_result sdss_result;

const char* sdss_version(void);

/* Loads and validates a run configuration (TOML-style sections
 * [plant] [controller] [synthesis] [output]). On failure returns NULL and,
 * when err is non-NULL, stores a message to release with sdss_string_free. */
sdss_config* sdss_config_load_file(const char* path, char** err);
sdss_config* sdss_config_load_string(const char* text, char** err);
void sdss_config_free(sdss_config* config);

/* Configured artifact path for kind "report", "history", "trajectory" or
 * "eval"; NULL for unknown kinds. Valid until sdss_config_free. */
const char* sdss_config_output_path(const sdss_config* config,
                                    const char* kind);

/* Full synthesis run. Result JSON = report, result CSV = history table. */
sdss_status sdss_synthesize(const sdss_config* config, sdss_result** out,
                            char** err);

/* Monte Carlo safety estimate for a fixed controller (high-fidelity solver).
 * controller_json accepts {"kp","ki","kd"}, {"degree","a","b"} or
 * {"channels":[...]}. samples <= 0 uses the configured eval budget;
 * use_seed == 0 falls back to the configured master seed. */
sdss_status sdss_evaluate(const sdss_config* config,
                          const char* controller_json, long samples,
                          uint64_t seed, int use_seed, sdss_result** out,
                          char** err);

/* Closed-loop linearization spectrum and accept/reject verdict. */
sdss_status sdss_stability(const sdss_config* config,
                           const char* controller_json, sdss_result** out,
                           char** err);

/* Single closed-loop trajectory; result CSV = t,x...,u...,y... grid. */
sdss_status sdss_simulate(const sdss_config* config,
                          const char* controller_json, uint64_t seed,
                          sdss_result** out, char** err);

/* Perturbation-growth diagnostics of the linearized loop. */
sdss_status sdss_bounds(const sdss_config* config, const char* controller_json,
                        double gamma, double t, sdss_result** out, char** err);

/* Result accessors; returned pointers stay valid until sdss_result_free. */
const char* sdss_result_json(const sdss_result* result);
const char* sdss_result_csv(const sdss_result* result); /* NULL if absent */
void sdss_result_free(sdss_result* result);

void sdss_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SDSS_H */
