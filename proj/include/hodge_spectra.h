#ifndef HODGE_SPECTRA_H
#define HODGE_SPECTRA_H

/*
 * C interface to the spectral laboratory: build simplicial tori and spheres,
 * attach flat or conformally deformed metrics, solve Hodge-Laplacian
 * spectra, export operators, and drive the experiment suite.
 *
 * Conventions:
 *  - Every constructor writes its result through an out parameter and
 *    returns hs_status; nonzero status means failure and *out is untouched.
 *  - hs_last_error() describes the most recent failure on this thread.
 *  - Strings returned through char** are heap-allocated; release them with
 *    hs_string_free. Handles are released with their matching *_free.
 */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define HS_API __declspec(dllexport)
#else
#define HS_API __attribute__((visibility("default")))
#endif

typedef enum hs_status {
  HS_OK = 0,
  HS_ERROR_INVALID_ARGUMENT = 1,
  HS_ERROR_RUNTIME = 2,
  HS_ERROR_BAD_HANDLE = 3
} hs_status;

typedef struct hs_complex hs_complex;
typedef struct hs_metric hs_metric;
typedef struct hs_spectrum hs_spectrum;

/* Message for the most recent failure on the calling thread. */
HS_API const char* hs_last_error(void);

HS_API void hs_string_free(char* text);

/* ---- simplicial complexes ---- */

/* Kuhn-triangulated flat n-torus; spacing is the per-cell edge length, so
 * the per-axis period is cells_per_axis * spacing. */
HS_API hs_status hs_complex_build_torus(int n, int cells_per_axis,
                                        double spacing, hs_complex** out);

/* Cross-polytope boundary sphere S^m refined `refinement` times. */
HS_API hs_status hs_complex_build_sphere(int m, int refinement,
                                         hs_complex** out);

/* Radial vertex grading toward `center` (length = chart dimension). */
HS_API hs_status hs_complex_grade_radial(const hs_complex* complex,
                                         const double* center, int center_len,
                                         double rate, hs_complex** out);

HS_API void hs_complex_free(hs_complex* complex);

HS_API hs_status hs_complex_dimension(const hs_complex* complex, int* out);
HS_API hs_status hs_complex_simplex_count(const hs_complex* complex,
                                          int degree, int64_t* out);
HS_API hs_status hs_complex_betti(const hs_complex* complex, int degree,
                                  int64_t* out);
HS_API hs_status hs_complex_to_json(const hs_complex* complex, char** out);

/* ---- metrics ---- */

HS_API hs_status hs_metric_flat(const hs_complex* complex, hs_metric** out);

/* Conformal cigar deformation of profile length `length` centered at
 * `center` (NULL = middle of the flat chart). */
HS_API hs_status hs_metric_apply_cigar(const hs_metric* metric, double length,
                                       const double* center, int center_len,
                                       hs_metric** out);

HS_API hs_status hs_metric_volume(const hs_metric* metric, double* out);

/* Rescales to unit volume; *scale_out receives the applied conformal
 * factor. Either out pointer may be NULL if the value is not needed. */
HS_API hs_status hs_metric_normalize_volume(const hs_metric* metric,
                                            hs_metric** out,
                                            double* scale_out);

HS_API void hs_metric_free(hs_metric* metric);

/* ---- spectra ---- */

/* Full degree-p spectrum: harmonic zeros plus the first `count` positive
 * eigenvalues (counted with multiplicity), classified exact/coexact. */
HS_API hs_status hs_spectrum_full(const hs_metric* metric, int degree,
                                  int count, uint64_t seed,
                                  hs_spectrum** out);

HS_API hs_status hs_spectrum_size(const hs_spectrum* spectrum, int64_t* out);

/* Entry `index` (0-based over clustered entries). `class_name` receives a
 * pointer to a static string: "harmonic", "exact", or "coexact". Any out
 * pointer may be NULL. */
HS_API hs_status hs_spectrum_entry(const hs_spectrum* spectrum, int64_t index,
                                   double* value, int* multiplicity,
                                   const char** class_name);

HS_API hs_status hs_spectrum_to_csv(const hs_spectrum* spectrum, char** out);
HS_API hs_status hs_spectrum_to_json(const hs_spectrum* spectrum, char** out);

HS_API void hs_spectrum_free(hs_spectrum* spectrum);

/* ---- operator export ---- */

/* Matrix Market text for one assembled operator; `which` is "mass" or
 * "stiffness". */
HS_API hs_status hs_operator_matrix_market(const hs_metric* metric,
                                           const char* which, int degree,
                                           char** out);

/* ---- experiments ---- */

/* Runs the experiment named inside the JSON configuration and writes
 * <experiment>.csv and <experiment>.json under out_dir. *exit_code receives
 * 0 (pass), 2 (inconclusive), or 1 (failed checks). A nonzero return means
 * the run could not be executed at all. */
HS_API hs_status hs_experiment_run(const char* config_json,
                                   const char* out_dir, int* exit_code);

/* Analytic growth-curve CSV (header L,mu,V,product). */
HS_API hs_status hs_theorem_curve_csv(int n, int p, const double* lengths,
                                      int num_lengths,
                                      double fixed_part_volume, char** out);

#ifdef __cplusplus
}
#endif

#endif /* HODGE_SPECTRA_H */
