#ifndef STOCHETD_H
#define STOCHETD_H

/* C interface to the stochetd shared library.
 *
 * Experiments are configured from JSON (see README for the schema), held
 * behind an opaque handle and driven by the run functions below. Every call
 * returns STOCHETD_OK (0) on success or a nonzero error code; the message for
 * the most recent failure on the calling thread is available from
 * stochetd_last_error().
 */

#include <stddef.h>

#if defined _WIN32
#define STOCHETD_API __declspec(dllexport)
#else
#define STOCHETD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define STOCHETD_OK 0
#define STOCHETD_ERR_RUNTIME 1
#define STOCHETD_ERR_CONFIG 2
#define STOCHETD_ERR_BLOWUP 3
#define STOCHETD_ERR_IO 4
#define STOCHETD_ERR_DIMENSION 5
#define STOCHETD_ERR_NONFINITE 6
#define STOCHETD_ERR_INVALID_ARG 7

typedef struct stochetd_experiment stochetd_experiment;

STOCHETD_API const char* stochetd_version(void);

/* Message describing the most recent error on this thread ("" if none). */
STOCHETD_API const char* stochetd_last_error(void);

/* Caps the harness worker count (equivalent to STOCHETD_THREADS). */
STOCHETD_API int stochetd_set_threads(int n);

STOCHETD_API int stochetd_experiment_create(const char* config_json,
                                            stochetd_experiment** out);
STOCHETD_API int stochetd_experiment_create_from_file(const char* path,
                                                      stochetd_experiment** out);
STOCHETD_API void stochetd_experiment_free(stochetd_experiment* exp);

/* Echo of the validated configuration; the buffer lives until the experiment
 * is freed or the function is called again. */
STOCHETD_API int stochetd_experiment_config_json(stochetd_experiment* exp,
                                                 const char** out_json);

/* Coupled-path strong-convergence study. Writes records.csv and report.json
 * (with per-scheme slope fits) under out_dir. Returns STOCHETD_ERR_BLOWUP if
 * every (scheme, dt) cell lost all ensemble members. */
STOCHETD_API int stochetd_run_convergence(stochetd_experiment* exp,
                                          const char* out_dir);

/* Convergence plus wall-clock timing; each sweep repeated `repeats` times. */
STOCHETD_API int stochetd_run_efficiency(stochetd_experiment* exp, int repeats,
                                         const char* out_dir);

/* Single-trajectory run emitting `snapshots` equispaced slices, CSV (x,u) or
 * binary SNAP frames. Returns STOCHETD_ERR_BLOWUP on a non-finite state. */
STOCHETD_API int stochetd_simulate(stochetd_experiment* exp, int snapshots,
                                   int binary_format, const char* out_dir);

/* Commutativity classification of the configured model; writes the JSON
 * report into the caller's buffer (truncating if needed). */
STOCHETD_API int stochetd_classify_noise(stochetd_experiment* exp, char* buffer,
                                         size_t buffer_size);

/* Dump of an ETD scheme's coefficient tables for a named model's linear
 * symbol: CSV columns k, eigenvalue_re, eigenvalue_im, coeff_name, value_re,
 * value_im. */
STOCHETD_API int stochetd_phi_check(const char* scheme, const char* model,
                                    int nx, double length, double dt,
                                    const char* out_csv);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* STOCHETD_H */
