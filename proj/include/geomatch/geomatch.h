/*
 * geomatch C API.
 *
 * Opaque handles own their data and are released with the matching *_free
 * function.  Every call returns a gm_status; on failure a description of the
 * most recent error on the calling thread is available from gm_last_error().
 * Strings returned through char** are heap allocated and released with
 * gm_string_free().  Matrices cross the boundary as row-major double arrays.
 */
#ifndef GEOMATCH_GEOMATCH_H
#define GEOMATCH_GEOMATCH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(GEOMATCH_BUILDING_LIBRARY)
#    define GM_API __declspec(dllexport)
#  else
#    define GM_API __declspec(dllimport)
#  endif
#else
#  define GM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gm_status {
  GM_OK = 0,
  GM_ERR_DIMENSION = 1,
  GM_ERR_PARAMETER = 2,
  GM_ERR_CONTRACT = 3,
  GM_ERR_CAPACITY = 4,
  GM_ERR_UNSUPPORTED_DIMENSION = 5,
  GM_ERR_IO = 6,
  GM_ERR_NULL_ARGUMENT = 7,
  GM_ERR_INTERNAL = 99
} gm_status;

typedef enum gm_model {
  GM_MODEL_LINEAR_ASSIGNMENT = 0,
  GM_MODEL_DOT_PRODUCT = 1,
  GM_MODEL_DISTANCE = 2
} gm_model;

typedef struct gm_instance gm_instance;
typedef struct gm_observation gm_observation;
typedef struct gm_sweep gm_sweep;

GM_API const char* gm_version(void);
GM_API const char* gm_status_name(gm_status status);
GM_API const char* gm_last_error(void);
GM_API void gm_string_free(char* s);

/* ---- instances ---------------------------------------------------------- */

/* covariance: optional d*d row-major matrix (NULL for the identity). */
GM_API gm_status gm_instance_sample(int n, int d, double sigma, const double* covariance,
                                    uint64_t seed, gm_instance** out);
GM_API gm_status gm_instance_from_json(const char* json, gm_instance** out);
GM_API gm_status gm_instance_to_json(const gm_instance* inst, char** out);
GM_API void gm_instance_free(gm_instance* inst);

GM_API gm_status gm_instance_shape(const gm_instance* inst, int* n, int* d, double* sigma);
/* pi_star receives n entries. */
GM_API gm_status gm_instance_pi_star(const gm_instance* inst, int* pi_star);
/* x and y receive n*d entries each; either may be NULL. */
GM_API gm_status gm_instance_points(const gm_instance* inst, double* x, double* y);
GM_API gm_status gm_instance_hash(const gm_instance* inst, uint64_t* out);

/* ---- observations and estimators ---------------------------------------- */

GM_API gm_status gm_observe(const gm_instance* inst, gm_model model, gm_observation** out);
GM_API void gm_observation_free(gm_observation* obs);
/* rows/cols describe each of the two payload matrices. */
GM_API gm_status gm_observation_shape(const gm_observation* obs, gm_model* model, int* rows,
                                      int* cols);
/* left and right receive rows*cols entries each; either may be NULL. */
GM_API gm_status gm_observation_payload(const gm_observation* obs, double* left, double* right);

/*
 * estimator: a bare name ("aml_grid2d", "umeyama_greedy", ...) or a JSON
 * object with the fields kind, matcher, grid_size, eta, max_iter, restarts,
 * mc_samples, seed and sigma.  perm receives n entries; objective and
 * iterations may be NULL.
 */
GM_API gm_status gm_estimate(const gm_observation* obs, const char* estimator, int* perm,
                             double* objective, int* iterations);

GM_API gm_status gm_overlap(const int* p, const int* q, int n, double* out);

/* w is n*n row-major; perm receives n entries. */
GM_API gm_status gm_solve_lap_max(const double* w, int n, int* perm, double* objective);
GM_API gm_status gm_greedy_match(const double* w, int n, int* perm, double* objective);

/* ---- sweeps ------------------------------------------------------------- */

GM_API gm_status gm_default_sigma_grid(int n, int d, double* grid, int capacity, int* count);

/* Writes the demo configuration for (n, d) as JSON. */
GM_API gm_status gm_demo_config(int n, int d, char** json_out);

/*
 * Runs the sweep described by config_json.  When the CSV cannot be written
 * the call returns GM_ERR_IO and *out still receives the finished records.
 */
GM_API gm_status gm_sweep_run(const char* config_json, gm_sweep** out);
GM_API void gm_sweep_free(gm_sweep* sweep);
GM_API gm_status gm_sweep_record_count(const gm_sweep* sweep, size_t* count);
GM_API gm_status gm_sweep_failure_count(const gm_sweep* sweep, size_t* count);
GM_API gm_status gm_sweep_csv(const gm_sweep* sweep, char** csv_out);
GM_API gm_status gm_sweep_summary_json(const gm_sweep* sweep, char** json_out);

/* ---- theory ------------------------------------------------------------- */

typedef void (*gm_verify_callback)(const char* name, int passed, const char* detail, void* user);

/* mgf_samples <= 0 selects the default sample count. */
GM_API gm_status gm_verify(long mgf_samples, uint64_t seed, gm_verify_callback cb, void* user,
                           int* failures);

GM_API gm_status gm_thresholds(int n, int d, double sigma, double epsilon, double* perfect,
                               double* almost, double* mi_almost_lhs, double* exact_nec_lhs);

#ifdef __cplusplus
}
#endif

#endif /* GEOMATCH_GEOMATCH_H */
