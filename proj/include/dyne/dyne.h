#ifndef DYNE_DYNE_H
#define DYNE_DYNE_H

/*
 * C interface to the adaptive-dyne phase-measurement toolkit: analytic
 * limits for squeezed-state phase estimation, a trajectory simulator for
 * the homodyne feedback policies, circular statistics, and the canned
 * reproduction experiments.
 *
 * Conventions:
 *   - Every fallible call returns a status code (DYNE_OK on success) and
 *     writes results through out-parameters. The most recent failure
 *     message for the calling thread is available via dyne_last_error().
 *   - Handles are created and released with the matching _new/_free pair;
 *     passing NULL where a handle is required yields DYNE_ERR_INVALID.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define DYNE_OK 0
#define DYNE_ERR_INVALID 1 /* bad argument, parse failure, unknown name */
#define DYNE_ERR_DOMAIN 2  /* formula evaluated outside its domain */
#define DYNE_ERR_RUNTIME 3 /* simulation failure */
#define DYNE_ERR_IO 4      /* file could not be written or read */

/* Library version string ("major.minor.patch"). */
const char* dyne_version(void);

/* Message describing the calling thread's most recent error ("" if none). */
const char* dyne_last_error(void);

/* ---------- analytic formulas ---------- */

/* n0 = ln(4 nbar) - (1/4) ln(2 pi). */
int dyne_optimal_n0(double nbar, double* out);

/* (n0 + 1)/(4 nbar^2) + 2 erfc(sqrt(2 n0)). */
int dyne_intrinsic_phase_variance(double nbar, double n0, double* out);

/* (ln nbar + 2.43)/(4 nbar^2). */
int dyne_theoretical_limit(double nbar, double* out);

/* (1/8) nbar^{-3/2}. */
int dyne_mark2_introduced(double nbar, double* out);

/* (1/4) nbar^{-1}. */
int dyne_heterodyne_introduced(double nbar, double* out);

/* (1 - eta)/(4 eta nbar). */
int dyne_efficiency_floor(double eta, double nbar, double* out);

/* Photon number where the mark II introduced variance meets the
 * efficiency floor; bisection over [lo, hi]. */
int dyne_crossover_nbar(double eta, double lo, double hi, double* out);

/* ---------- configuration ---------- */

typedef struct dyne_config dyne_config;

dyne_config* dyne_config_new(void);
void dyne_config_free(dyne_config* config);

/* Replace the whole configuration from a JSON document (schema v1). */
int dyne_config_load_json(dyne_config* config, const char* text);

/* Serialize to JSON. Writes up to cap bytes including the terminator;
 * *needed receives the full length (excluding terminator) regardless. */
int dyne_config_dump_json(const dyne_config* config, char* buf, size_t cap,
                          size_t* needed);

int dyne_config_set_nbar(dyne_config* config, double nbar);

/* kind: "coherent" or "optimal_squeezed". */
int dyne_config_set_state_kind(dyne_config* config, const char* kind);

/* policy: NAME[:params], e.g. "mark2", "ceps:0.5", "teps:divisor=1.1",
 * "corrected:lambda=1e-3,divisor=1,onset_v=0.9", "heterodyne:450". */
int dyne_config_set_policy(dyne_config* config, const char* policy);

/* Explicit feedback interval; turns the paper rule off. */
int dyne_config_set_dv(dyne_config* config, double dv);

/* Feedback interval nbar*V_th(nbar)/25. */
int dyne_config_set_paper_rule(dyne_config* config, int enabled);

int dyne_config_set_substeps(dyne_config* config, int substeps);
int dyne_config_set_trajectories(dyne_config* config, uint64_t n);
int dyne_config_set_seed(dyne_config* config, uint64_t seed);

/* Nonzero: each trajectory draws a uniform true phase; zero: phase 0. */
int dyne_config_set_random_phase(dyne_config* config, int enabled);

/* FNV-1a 64 hash of the canonical JSON form. */
int dyne_config_hash(const dyne_config* config, uint64_t* out);

/* Resolved feedback interval (applies the paper rule if enabled). */
int dyne_config_resolved_dv(const dyne_config* config, double* out);

/* ---------- simulation ---------- */

typedef struct dyne_result dyne_result;

/* Run the configured ensemble on `workers` threads (0 means 1). Results
 * are a pure function of the configuration; worker count never changes
 * them. trace_path, when non-NULL, receives trajectory 0's feedback
 * history as a columnar .dat file. */
int dyne_simulate(const dyne_config* config, unsigned workers,
                  const char* trace_path, dyne_result** out);

void dyne_result_free(dyne_result* result);

/* Ensemble statistics (failed trajectories excluded and counted). */
int dyne_result_n_samples(const dyne_result* result, uint64_t* out);
int dyne_result_failed_count(const dyne_result* result, uint64_t* out);
int dyne_result_holevo(const dyne_result* result, double* out);
int dyne_result_holevo_stderr(const dyne_result* result, double* out);
int dyne_result_wrapped(const dyne_result* result, double* out);
int dyne_result_mean_error(const dyne_result* result, double* out);

/* holevo / (2 * intrinsic variance of the configured input state). */
int dyne_result_ratio_to_limit(const dyne_result* result, double* out);

/* Per-trajectory access, index in [0, n_trajectories). */
int dyne_result_n_trajectories(const dyne_result* result, uint64_t* out);
int dyne_result_trajectory(const dyne_result* result, uint64_t index,
                           double* true_phase, double* theta_hat,
                           double* wrapped_error, int* failed);

/* Recovered squeezing of one trajectory's final record; DYNE_ERR_DOMAIN
 * when the record is degenerate. */
int dyne_result_zeta(const dyne_result* result, uint64_t index,
                     double* nbar_est, double* zeta_re, double* zeta_im);

/* Scatter diagnostics: excess-variance ratios from |zeta| and arg zeta
 * deviations, and the fraction of points below the optimal-zeta curve. */
int dyne_result_zeta_excess(const dyne_result* result,
                            double* from_modulus_ratio,
                            double* from_phase_ratio, double* fraction_below);

/* Persistence. Summary CSV/JSON follow the documented schemas; the JSON
 * timestamp is included only when with_timestamp is nonzero. */
int dyne_result_write_summary_csv(const dyne_result* result, const char* path);
int dyne_result_write_trajectory_csv(const dyne_result* result,
                                     const char* path);
int dyne_result_write_summary_json(const dyne_result* result,
                                   const char* path, int with_timestamp);

/* One CSV with a summary row per result (provenance preamble from the
 * first result's configuration). */
int dyne_results_write_summary_csv(const dyne_result* const* results,
                                   size_t n, const char* path);

/* zeta-excess CSV (one row per result: nbar and the two excess ratios),
 * the input format of the "contributions" plot. */
int dyne_results_write_zeta_excess_csv(const dyne_result* const* results,
                                       size_t n, const char* path);

/* Columnar .dat plot files plus plain-text recipes, written into out_dir.
 * kind: "variance-vs-nbar", "ratio", "zeta-scatter" (first result's
 * ensemble), or "contributions" (per-result zeta excess). fit, when
 * non-NULL, points to {exponent, prefactor} and adds the fitted curve to
 * "variance-vs-nbar". */
int dyne_emit_plots(const dyne_result* const* results, size_t n,
                    const char* kind, const char* out_dir, const double* fit);

/* Same emission, but from persisted CSV files: a summary CSV for
 * "variance-vs-nbar" and "ratio", a trajectory CSV for "zeta-scatter",
 * a zeta-excess CSV for "contributions". state_kind ("coherent" or
 * "optimal_squeezed") supplies the input state for reference curves,
 * which the summary schema does not record. */
int dyne_emit_plots_from_file(const char* kind, const char* in_path,
                              const char* out_dir, const char* state_kind,
                              const double* fit);

/* Reads a summary CSV back; fills up to cap entries of each non-NULL
 * array and sets *n_rows to the total row count. intrinsic receives the
 * input state's intrinsic phase variance under state_kind. */
int dyne_summary_read(const char* path, const char* state_kind, double* nbar,
                      double* holevo, double* intrinsic, size_t cap,
                      size_t* n_rows);

/* ---------- fitting ---------- */

/* Least-squares fit variance = prefactor * nbar^{-exponent} in log-log
 * space; n >= 3 and all inputs positive. Any out-pointer may be NULL. */
int dyne_power_law_fit(const double* nbar, const double* variance, size_t n,
                       double* exponent, double* prefactor,
                       double* exponent_stderr, double* r_squared);

/* ---------- reproduction presets ---------- */

/* Number of built-in presets. */
int dyne_preset_count(void);

/* Name of preset `index` (0-based). */
int dyne_preset_name(int index, char* buf, size_t cap);

/* One-line description of a preset. */
int dyne_preset_description(const char* name, char* buf, size_t cap);

/* Run a preset and compare against its pinned expectation. *passed is
 * set to 1/0; the report text is written to buf (truncated to cap).
 * Returns DYNE_OK even when the comparison fails (see *passed);
 * DYNE_ERR_INVALID for unknown names. */
int dyne_reproduce(const char* name, unsigned workers, char* buf, size_t cap,
                   int* passed);

#ifdef __cplusplus
}
#endif

#endif /* DYNE_DYNE_H */
