#ifndef REVIVAL_REVIVAL_H
#define REVIVAL_REVIVAL_H

/* C interface to the driven-bouncer revival library.
 *
 * Every fallible call returns an rv_status; on failure a description is
 * available from rv_last_error() on the calling thread until the next call.
 * Handles are opaque and owned by the caller, who releases them with the
 * matching *_destroy function (NULL is accepted). */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(REVIVAL_BUILDING_LIBRARY)
#    define RV_API __declspec(dllexport)
#  else
#    define RV_API __declspec(dllimport)
#  endif
#else
#  define RV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rv_status {
  RV_OK = 0,
  RV_ERR_INVALID_ARGUMENT = 10,
  RV_ERR_DOMAIN = 11,
  RV_ERR_CONFIG = 12,
  RV_ERR_NUMERIC = 20,
  RV_ERR_SINGULAR_ORDER = 21,
  RV_ERR_RESONANCE_SINGULARITY = 22,
  RV_ERR_BRANCH_AMBIGUITY = 23,
  RV_ERR_NO_RESONANCE = 24,
  RV_ERR_DEGENERATE_SPECTRUM = 25,
  RV_ERR_INSTABILITY = 26,
  RV_ERR_FIT = 27,
  RV_ERR_DETECTION = 30,
  RV_ERR_IO = 40,
  RV_ERR_INTERNAL = 99
} rv_status;

RV_API const char* rv_version(void);
RV_API const char* rv_status_name(rv_status status);
RV_API const char* rv_last_error(void);

/* ---- units ---- */

typedef struct rv_units {
  double length_scale; /* m */
  double time_scale;   /* s */
  double energy_scale; /* J */
  double kbar;
} rv_units;

/* drive_frequency in rad/s */
RV_API rv_status rv_derive_units(double mass, double gravity, double drive_frequency, double hbar, rv_units* out);

/* ---- spectrum ---- */

typedef enum rv_spectrum_kind { RV_SPECTRUM_TRIANGULAR = 0, RV_SPECTRUM_NUMERIC = 1 } rv_spectrum_kind;

typedef struct rv_spectrum rv_spectrum;

RV_API rv_status rv_spectrum_create(rv_spectrum_kind kind, double kbar, double V0, double kappa, rv_spectrum** out);
RV_API void rv_spectrum_destroy(rv_spectrum* spectrum);
RV_API rv_status rv_spectrum_energy(const rv_spectrum* spectrum, double n, double* energy);
RV_API rv_status rv_spectrum_level(const rv_spectrum* spectrum, double energy, double* n);
RV_API rv_status rv_spectrum_derivatives(const rv_spectrum* spectrum, double n, double* first, double* second);
RV_API rv_status rv_spectrum_period(const rv_spectrum* spectrum, double energy, double* period);

/* ---- Mathieu characteristic values ---- */

RV_API rv_status rv_mathieu_series(double nu, double q, double* a);
/* truncation <= 0 selects the default; *truncation_used may be NULL. */
RV_API rv_status rv_mathieu_matrix(double nu, double q, int truncation, double* a, int* truncation_used);

/* ---- resonance and analytic revival times ---- */

typedef struct rv_resonance {
  int N;
  long r;
  double level;
  double E_r;
  double E_r1; /* dE/dn */
  double E_r2; /* d2E/dn2 */
  double E_N;
  double V;
  double kbar;
  double lambda;
  double mu;
  double q;
  int tie;
} rv_resonance;

typedef enum rv_formula { RV_FORMULA_GENERAL = 0, RV_FORMULA_BOUNCER = 1, RV_FORMULA_BOUNCER_SIMPLE = 2 } rv_formula;

typedef struct rv_prediction {
  double T0;
  double T_lambda;
  double ratio;
  rv_formula formula;
} rv_prediction;

RV_API rv_status rv_resonance_build(const rv_spectrum* spectrum, double E_r, double lambda, rv_resonance* out);
/* use_matrix = 0 selects the small-q series. */
RV_API rv_status rv_quasi_energy(const rv_resonance* ctx, int k, int use_matrix, double* out);
RV_API rv_status rv_classical_period(const rv_resonance* ctx, double* out);
RV_API rv_status rv_revival_time(const rv_resonance* ctx, rv_formula formula, double lambda, rv_prediction* out);

/* ---- run configuration ---- */

typedef struct rv_config rv_config;

RV_API rv_status rv_config_parse(const char* text, rv_config** out);
RV_API rv_status rv_config_parse_file(const char* path, rv_config** out);
RV_API void rv_config_destroy(rv_config* config);
RV_API rv_status rv_config_set(rv_config* config, const char* key, const char* value);
/* Copies the NUL-terminated resolved configuration into buf when it fits;
 * *needed (may be NULL) receives the size including the terminator. */
RV_API rv_status rv_config_echo(const rv_config* config, char* buf, size_t capacity, size_t* needed);
RV_API rv_status rv_config_get_number(const rv_config* config, const char* key, double* value);
RV_API rv_status rv_config_get_string(const rv_config* config, const char* key, char* buf, size_t capacity,
                                      size_t* needed);
RV_API size_t rv_config_lambda_count(const rv_config* config);
RV_API rv_status rv_config_lambdas(const rv_config* config, double* out, size_t capacity);
RV_API rv_status rv_config_spectrum(const rv_config* config, rv_spectrum** out);
RV_API rv_status rv_config_units(const rv_config* config, rv_units* out);

/* ---- simulation ---- */

typedef void (*rv_progress_fn)(double value, void* user);

typedef struct rv_run_info {
  double x0;
  double sigma;
  double T_cl;
  double T_guess;
  double dt;
  double sample_interval;
  double t_end;
  int n_points;
} rv_run_info;

typedef struct rv_series rv_series;

RV_API rv_status rv_run_plan(const rv_config* config, double lambda, rv_run_info* out);
/* One evolution at the configured E_r. resume_from (may be NULL) continues a
 * checkpoint written by an earlier run of the same configuration;
 * checkpoint_to (may be NULL) receives the final state. progress receives the
 * simulated time. An incomplete series is still returned in *out together
 * with RV_ERR_INSTABILITY. */
RV_API rv_status rv_simulate(const rv_config* config, double lambda, const char* resume_from, const char* checkpoint_to,
                             rv_progress_fn progress, void* user, rv_series** out);
RV_API void rv_series_destroy(rv_series* series);
RV_API size_t rv_series_size(const rv_series* series);
RV_API rv_status rv_series_sample(const rv_series* series, size_t index, double* t, double* re, double* im);
RV_API int rv_series_complete(const rv_series* series);
RV_API double rv_series_max_norm_drift(const rv_series* series);
RV_API double rv_series_sample_interval(const rv_series* series);
RV_API double rv_series_time_step(const rv_series* series);
RV_API rv_status rv_series_write_csv(const rv_series* series, const char* path);

typedef struct rv_revival_estimate {
  double T_rev;
  double peak_value;
  double t_lo;
  double t_hi;
  double smoothing_width;
} rv_revival_estimate;

/* smoothing_width <= 0 measures the classical period from the series. */
RV_API rv_status rv_extract_revival(const rv_series* series, double T_guess, double smoothing_width,
                                    rv_revival_estimate* out);
RV_API rv_status rv_extract_classical_period(const rv_series* series, double* period);

/* ---- sweep ---- */

typedef struct rv_sweep rv_sweep;

typedef struct rv_sweep_row {
  double lambda;
  double T_numeric;
  double T_analytic_general;
  double T_analytic_simple;
  double ratio_numeric;
  double ratio_analytic_general;
  double ratio_analytic_simple;
  rv_status status;
  double max_norm_drift;
} rv_sweep_row;

typedef struct rv_fit {
  double coefficient;
  double intercept;
  double r_squared;
  size_t rows_used;
} rv_fit;

/* progress receives the lambda of each finished row. */
RV_API rv_status rv_sweep_run(const rv_config* config, int workers, rv_progress_fn progress, void* user,
                              rv_sweep** out);
RV_API rv_status rv_sweep_read_csv(const char* path, rv_sweep** out);
RV_API void rv_sweep_destroy(rv_sweep* sweep);
RV_API size_t rv_sweep_size(const rv_sweep* sweep);
RV_API rv_status rv_sweep_row_get(const rv_sweep* sweep, size_t index, rv_sweep_row* out);
/* Failure text of a row, empty for successful rows. */
RV_API const char* rv_sweep_row_message(const rv_sweep* sweep, size_t index);
RV_API rv_status rv_sweep_write_csv(const rv_sweep* sweep, const char* path);
RV_API rv_status rv_sweep_fit(const rv_sweep* sweep, rv_fit* out);

/* ---- checkpoints ---- */

typedef struct rv_checkpoint_info {
  int n_points;
  double x_min;
  double x_max;
  double time;
  double norm;
} rv_checkpoint_info;

RV_API rv_status rv_checkpoint_inspect(const char* path, rv_checkpoint_info* out);

#ifdef __cplusplus
}
#endif

#endif
