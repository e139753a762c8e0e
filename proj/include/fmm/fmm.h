/* C interface to the FMM signal-fitting library.
 *
 * Every object is an opaque handle created and destroyed here. Functions
 * return fmm_status; on failure fmm_last_error() describes the problem for
 * the calling thread. Strings returned through char** outputs are owned by
 * the caller and released with fmm_string_free().
 */

#ifndef FMM_FMM_H
#define FMM_FMM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef FMM_BUILD
#    define FMM_API __declspec(dllexport)
#  else
#    define FMM_API __declspec(dllimport)
#  endif
#else
#  define FMM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fmm_status {
    FMM_OK = 0,
    FMM_ERROR_INTERNAL = 1, /* unexpected failure */
    FMM_ERROR_CONFIG = 2,   /* invalid parameters or configuration */
    FMM_ERROR_FORMAT = 3,   /* malformed CSV/JSON input */
    FMM_ERROR_FIT = 4       /* numerical failure while fitting */
} fmm_status;

typedef struct fmm_series fmm_series;
typedef struct fmm_config fmm_config;
typedef struct fmm_fit fmm_fit;

FMM_API const char* fmm_version(void);

/* Message for the most recent failure on this thread; never NULL. */
FMM_API const char* fmm_last_error(void);

FMM_API void fmm_string_free(char* s);

/* ---- time series ------------------------------------------------------- */

/* Time points must be strictly increasing within one period ([0, 2pi]). */
FMM_API fmm_status fmm_series_create(const double* time_points, const double* values,
                                     size_t n, fmm_series** out);

/* Reads a CSV with header "value" or "time,value". period > 0 rescales the
 * time column from [t0, t0 + period] onto [0, 2pi]; n_periods > 1 averages
 * the record period-wise. */
FMM_API fmm_status fmm_series_read_csv(const char* path, int n_periods, double period,
                                       double t0, fmm_series** out);

FMM_API void fmm_series_free(fmm_series* s);
FMM_API size_t fmm_series_size(const fmm_series* s);
FMM_API const double* fmm_series_time_points(const fmm_series* s);
FMM_API const double* fmm_series_values(const fmm_series* s);

/* Two-column "time,value" text with full (17 digit) precision. */
FMM_API fmm_status fmm_series_to_csv(const fmm_series* s, char** out);
FMM_API fmm_status fmm_series_write_csv(const fmm_series* s, const char* path);

/* ---- synthetic data ----------------------------------------------------- */

typedef struct fmm_gen_spec {
    double intercept;
    const double* amp;    size_t amp_len;
    const double* alpha;  size_t alpha_len;
    const double* beta;   size_t beta_len;
    const double* omega;  size_t omega_len;
    double from_t;            /* default 0 */
    double to_t;              /* default 2pi */
    size_t length_out;        /* default 100 */
    const double* time_points; /* overrides from/to/length_out when non-NULL */
    size_t time_points_len;
    double sigma_noise;       /* default 0 */
    uint64_t seed;
    int has_seed;             /* 0: draw a fresh seed */
} fmm_gen_spec;

/* Fills defaults; parameter arrays start out NULL and must be supplied. */
FMM_API void fmm_gen_spec_init(fmm_gen_spec* spec);

/* Samples an FMM model, recycling parameter lists to the longest length and
 * adding gaussian noise when sigma_noise > 0. */
FMM_API fmm_status fmm_generate(const fmm_gen_spec* spec, fmm_series** out);

/* ---- fit configuration -------------------------------------------------- */

/* Defaults: alpha grid 48, omega grid 24, 3 refinement repetitions,
 * maxiter = nback, no stop rule, unrestricted blocks, no parallelism. */
FMM_API fmm_status fmm_config_create(size_t nback, fmm_config** out);
FMM_API void fmm_config_free(fmm_config* cfg);
FMM_API fmm_status fmm_config_set_grid(fmm_config* cfg, size_t alpha_count,
                                       size_t omega_count, size_t num_reps);
FMM_API fmm_status fmm_config_set_max_iter(fmm_config* cfg, size_t maxiter);
/* Stop once the pass-to-pass R2 gain drops to dif_max or below. */
FMM_API fmm_status fmm_config_set_stop_r2(fmm_config* cfg, double dif_max);
FMM_API fmm_status fmm_config_set_stop_always_false(fmm_config* cfg);
/* Equal labels force equal beta (resp. omega) across those waves. */
FMM_API fmm_status fmm_config_set_beta_restrictions(fmm_config* cfg, const int* labels,
                                                    size_t n);
FMM_API fmm_status fmm_config_set_omega_restrictions(fmm_config* cfg, const int* labels,
                                                     size_t n);
FMM_API fmm_status fmm_config_set_parallel(fmm_config* cfg, int enabled);

/* ---- fitting ------------------------------------------------------------ */

FMM_API fmm_status fmm_fit_series(const fmm_series* s, const fmm_config* cfg, fmm_fit** out);
FMM_API void fmm_fit_free(fmm_fit* fit);

FMM_API size_t fmm_fit_wave_count(const fmm_fit* fit);
FMM_API double fmm_fit_intercept(const fmm_fit* fit);
FMM_API fmm_status fmm_fit_wave_params(const fmm_fit* fit, size_t index, double* amp,
                                       double* alpha, double* beta, double* omega);
FMM_API double fmm_fit_sse(const fmm_fit* fit);
FMM_API double fmm_fit_r2_total(const fmm_fit* fit);
/* out must hold fmm_fit_wave_count values. */
FMM_API fmm_status fmm_fit_r2_waves(const fmm_fit* fit, double* out);
FMM_API size_t fmm_fit_iterations(const fmm_fit* fit);
/* 1 when the R2 stop rule fired, 0 when maxiter passes ran. */
FMM_API int fmm_fit_stopped_by_rule(const fmm_fit* fit);
FMM_API size_t fmm_fit_sample_count(const fmm_fit* fit);
/* Buffers must hold fmm_fit_sample_count values. */
FMM_API fmm_status fmm_fit_fitted_values(const fmm_fit* fit, double* out);
FMM_API fmm_status fmm_fit_residuals(const fmm_fit* fit, double* out);

/* Per-wave peak/trough times and total-signal values there. Buffers must
 * hold fmm_fit_wave_count values; wrap_to_2pi folds times into [0, 2pi). */
FMM_API fmm_status fmm_fit_peaks(const fmm_fit* fit, int wrap_to_2pi, double* t_upper,
                                 double* z_upper, double* t_lower, double* z_lower);

/* Model evaluation at arbitrary times: the full signal, or one wave's
 * centered contribution A cos(phi(t)). */
FMM_API fmm_status fmm_fit_model_values(const fmm_fit* fit, const double* t, size_t n,
                                        double* out);
FMM_API fmm_status fmm_fit_wave_values(const fmm_fit* fit, size_t index, const double* t,
                                       size_t n, double* out);

/* ---- result serialization ----------------------------------------------- */

FMM_API fmm_status fmm_fit_to_json(const fmm_fit* fit, char** out);
/* Rebuilds a fit handle from JSON. The handle carries no time points, so
 * the CSV exports below reject it; everything else works. */
FMM_API fmm_status fmm_fit_from_json(const char* json_text, fmm_fit** out);

/* "timePoints,fitted" */
FMM_API fmm_status fmm_fit_fitted_csv(const fmm_fit* fit, char** out);
/* "timePoints,wave1,...,waveM" with centered per-wave contributions. */
FMM_API fmm_status fmm_fit_components_csv(const fmm_fit* fit, char** out);

#ifdef __cplusplus
}
#endif

#endif /* FMM_FMM_H */
