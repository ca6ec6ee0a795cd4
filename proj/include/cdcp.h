/* C API for the compound dynamic contagion pricing engine.
 *
 * All functionality is reachable through an opaque engine handle created from
 * a JSON run configuration. Results come back as opaque numeric tables with
 * named columns (and, for validation, labelled rows). Every entry point
 * returns a status code; the per-engine error message describes the last
 * failure. Strings returned by the API are owned by the engine/table and stay
 * valid until the owner is freed.
 */
#ifndef CDCP_H
#define CDCP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    CDCP_OK = 0,
    CDCP_ERR_CONFIG = 2,   /* invalid configuration */
    CDCP_ERR_REGIME = 3,   /* infeasible tilt/regime for the requested run */
    CDCP_ERR_NUMERIC = 4,  /* numerical failure (quadrature, domination, ...) */
    CDCP_ERR_ARGUMENT = 5, /* bad argument at the C boundary */
    CDCP_ERR_INTERNAL = 6
} cdcp_status;

typedef enum { CDCP_MEASURE_P = 0, CDCP_MEASURE_PSTAR = 1 } cdcp_measure;

typedef struct cdcp_engine cdcp_engine;
typedef struct cdcp_table cdcp_table;

const char* cdcp_version(void);
const char* cdcp_status_name(cdcp_status status);

/* Engine lifecycle. On failure *out is NULL and cdcp_last_create_error()
 * holds the message (thread-local). */
cdcp_status cdcp_engine_create(const char* config_json, cdcp_engine** out);
void cdcp_engine_free(cdcp_engine* engine);
const char* cdcp_last_create_error(void);
const char* cdcp_engine_last_error(const cdcp_engine* engine);

/* Fully resolved configuration (defaults filled), as JSON. */
const char* cdcp_engine_resolved_config(cdcp_engine* engine);

/* Solved measure-change curves. Columns: t, B, K. */
cdcp_status cdcp_bcurve(cdcp_engine* engine, cdcp_table** out);

/* First moments at the given times. Columns: t, mean_lambda, mean_N, mean_C.
 * P uses the closed forms, PSTAR the tilted-mean quadrature. */
cdcp_status cdcp_moments(cdcp_engine* engine, cdcp_measure measure,
                         const double* ts, size_t n_ts, cdcp_table** out);

/* Analytic tilted mean E*[C_t]. */
cdcp_status cdcp_mean_c_star(cdcp_engine* engine, double t, double* out);

/* Stop-loss premiums at the configured retentions under one measure.
 * Columns: L, estimate, stderr, ci_lo, ci_hi. */
cdcp_status cdcp_price(cdcp_engine* engine, cdcp_measure measure,
                       cdcp_table** out);

/* Sensitivity sweep per the configured sweep spec. Columns: param_value,
 * skipped, analytic, mc, mc_stderr, mc_lo, mc_hi, sl, sl_stderr, sl_lo,
 * sl_hi. Skipped rows carry their reason as the row label. */
cdcp_status cdcp_sweep(cdcp_engine* engine, cdcp_table** out);

/* Per-path event log. Columns: path_id, event_type (0 external, 1 self),
 * time, mark, claim. */
cdcp_status cdcp_simulate_events(cdcp_engine* engine, cdcp_measure measure,
                                 size_t n_paths, cdcp_table** out);

/* Sampled (t, lambda_t, C_t) trajectories for path plots. Columns: path_id,
 * t, lambda, C. */
cdcp_status cdcp_trajectories(cdcp_engine* engine, cdcp_measure measure,
                              size_t n_paths, size_t n_samples,
                              cdcp_table** out);

/* Internal-consistency suite (curve identities, martingale check,
 * moments-vs-MC). Rows are labelled checks; columns: pass, value, reference,
 * tolerance. *all_pass is 1 when every check passed. */
cdcp_status cdcp_validate(cdcp_engine* engine, cdcp_table** out,
                          int* all_pass);

/* Table access. */
size_t cdcp_table_rows(const cdcp_table* table);
size_t cdcp_table_cols(const cdcp_table* table);
const char* cdcp_table_col_name(const cdcp_table* table, size_t col);
const char* cdcp_table_row_label(const cdcp_table* table, size_t row);
double cdcp_table_cell(const cdcp_table* table, size_t row, size_t col);
void cdcp_table_free(cdcp_table* table);

#ifdef __cplusplus
}
#endif

#endif /* CDCP_H */
