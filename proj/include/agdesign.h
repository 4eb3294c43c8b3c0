/* agdesign — power and sample size for recurrent-event trials analyzed with
 * the Andersen-Gill proportional rates model (robust Wald test), plus a
 * Monte Carlo verification engine (mixed Poisson process simulator and an
 * AG fitter with sandwich variance).
 *
 * Usage pattern: build an agd_scenario from a JSON configuration string,
 * query it, free it. All functions return AGD_OK (0) on success; on failure
 * they return a nonzero status and leave a message in agd_last_error()
 * (thread-local). Strings returned through char** are heap-allocated and
 * must be released with agd_string_free().
 */
#ifndef AGDESIGN_H
#define AGDESIGN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum agd_status {
  AGD_OK = 0,
  AGD_STATUS_VALIDATION = 2, /* bad input, config, or precondition */
  AGD_STATUS_NUMERIC = 3,    /* non-convergence or degenerate scenario */
  AGD_STATUS_ARGUMENT = 4    /* null pointer or malformed call */
} agd_status;

/* Opaque scenario handle: design, both arms, hypothesis, run defaults. */
typedef struct agd_scenario agd_scenario;

const char* agd_version(void);

/* Message for the most recent failure on this thread; never NULL. */
const char* agd_last_error(void);

void agd_string_free(char* text);

/* ---- scenario lifecycle -------------------------------------------------- */

/* Parse a JSON configuration (see the README for the schema). Unknown fields
 * are validation errors. */
agd_status agd_scenario_from_json(const char* json_text, agd_scenario** out);

void agd_scenario_free(agd_scenario* scenario);

/* Canonical JSON of the fully-resolved configuration; feeding it back into
 * agd_scenario_from_json reproduces the scenario exactly. */
agd_status agd_scenario_to_json(const agd_scenario* scenario, char** json_out);

/* ---- design-stage quantities --------------------------------------------- */

typedef struct agd_variance_result {
  double v_beta;      /* asymptotic variance of sqrt(n) * beta_hat */
  double e0, f0;      /* control-arm exposure moments */
  double e1, f1;      /* treatment-arm exposure moments */
  int path;           /* 0 = general quadrature, 1 = equal-dropout closed form */
} agd_variance_result;

agd_status agd_variance(const agd_scenario* scenario, agd_variance_result* out);

typedef struct agd_size_result {
  long total_n;
  long n_treatment;
  long n_control;
  double raw_n;         /* pre-rounding solution of the size equation */
  double nominal_power; /* power at total_n */
} agd_size_result;

agd_status agd_size(const agd_scenario* scenario, double target_power,
                    agd_size_result* out);

/* Power at a total sample size. margin_feasible_out (may be NULL) reports the
 * equivalence validity condition: it is 0 when the CI cannot fit inside the
 * margins at this n, in which case power is 0. */
agd_status agd_power(const agd_scenario* scenario, long n_total, double* power_out,
                     int* margin_feasible_out);

/* ---- Monte Carlo ---------------------------------------------------------- */

typedef struct agd_sim_result {
  long replicates;
  long rejections;
  double empirical_power;
  double mc_stderr;
  long degenerate_count;
  double wall_seconds;
} agd_sim_result;

/* Simulate `replicates` trials of size n_total, fit each with the AG model
 * and apply the scenario's hypothesis test. Deterministic in (seed) for any
 * thread count; threads <= 0 selects hardware concurrency. */
agd_status agd_simulate(const agd_scenario* scenario, long n_total, long replicates,
                        uint64_t seed, int threads, agd_sim_result* out);

/* One simulated trial as counting-process CSV
 * (subject_id,arm,entry,follow_up,event_time; one row per event plus a
 * terminal censoring row per subject). */
agd_status agd_simulate_trial_csv(const agd_scenario* scenario, long n_total,
                                  uint64_t seed, uint64_t replicate, char** csv_out);

/* Fit the AG model to counting-process CSV data (the layout emitted above).
 * Returns a JSON object with beta_hat, robust_var, ci, convergence flags. */
agd_status agd_fit_csv(const char* csv_text, double alpha, char** json_out);

/* ---- reference tables and self checks ------------------------------------ */

/* Recompute the built-in design tables (1 = superiority grid, 2 = unequal
 * dispersion/dropout grids, 3 = NI and equivalence grids) as a JSON array of
 * rows. replicates > 0 adds simulated power per row. */
agd_status agd_reproduce_table(int table_id, long replicates, uint64_t seed,
                               int threads, char** json_out);

/* Run the built-in invariant suite. JSON report out (may be NULL); returns
 * AGD_OK when every check passes, AGD_STATUS_NUMERIC otherwise. */
agd_status agd_self_check(char** json_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* AGDESIGN_H */
