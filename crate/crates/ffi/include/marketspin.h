/* C interface for the marketspin spin-agent market simulator. */

#pragma once

/* Generated with cbindgen:0.26.0 */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Energetic back-action of the buyer/seller imbalance.
 */
typedef enum MsFeedback {
  MS_FEEDBACK_CONTRARIAN = 0,
  MS_FEEDBACK_HERDING = 1,
  /**
   * Imbalance only scales the price (reference behavior).
   */
  MS_FEEDBACK_PRICE_ONLY = 2,
} MsFeedback;

/**
 * Spin-space selector for `MsRunParams`.
 */
typedef enum MsSpinKind {
  /**
   * Integer states -S..=S; set `s`.
   */
  MS_SPIN_KIND_DISCRETE = 0,
  /**
   * Real states in [-1, 1]; `s` is ignored.
   */
  MS_SPIN_KIND_CONTINUOUS = 1,
} MsSpinKind;

/**
 * Result codes returned by every fallible entry point.
 */
typedef enum MsStatus {
  MS_STATUS_OK = 0,
  /**
   * A parameter failed validation (bad sizes, fractions, temperatures).
   */
  MS_STATUS_INVALID_ARGUMENT = 1,
  /**
   * The simulation itself failed.
   */
  MS_STATUS_RUNTIME_ERROR = 2,
  /**
   * A required pointer was null.
   */
  MS_STATUS_NULL_POINTER = 3,
} MsStatus;

typedef enum MsUpdateMode {
  MS_UPDATE_MODE_SNAPSHOT = 0,
  MS_UPDATE_MODE_IN_PLACE = 1,
} MsUpdateMode;

/**
 * Opaque interaction network.
 */
typedef struct MsGraph MsGraph;

/**
 * Opaque mean-field trajectory.
 */
typedef struct MsMfTrajectory MsMfTrajectory;

/**
 * Opaque per-sweep record of one market run.
 */
typedef struct MsSeries MsSeries;

/**
 * Market-run parameters. At most one boost pulse is expressible here;
 * richer schedules are a CLI/config feature.
 */
typedef struct MsRunParams {
  enum MsSpinKind spin_kind;
  /**
   * Discrete amplitude S (>= 1); ignored for continuous spins.
   */
  uint32_t s;
  double j;
  double a;
  double clearing_price;
  double temperature;
  enum MsFeedback feedback;
  enum MsUpdateMode mode;
  uint64_t n_sweeps;
  double f_up;
  double f_dn;
  uint64_t seed;
  /**
   * When true, apply `pulse_h` on sweeps [pulse_t1, pulse_t2).
   */
  bool has_pulse;
  uint64_t pulse_t1;
  uint64_t pulse_t2;
  double pulse_h;
} MsRunParams;

/**
 * One row of a market time series.
 */
typedef struct MsSeriesRow {
  uint64_t t;
  double energy;
  double m_total;
  double n_up;
  double n_dn;
  double price;
  double ret;
  double field;
} MsSeriesRow;

/**
 * Per-agent thermal averages.
 */
typedef struct MsThermalStats {
  double temperature;
  double e_mean;
  double c_v;
  double m_mean;
  double chi;
} MsThermalStats;

/**
 * Two-community mean-field parameters.
 */
typedef struct MsMfParams {
  double j1;
  double j2;
  double k12;
  double k21;
  double a;
  double temperature;
  uint32_t m1;
  uint32_t m2;
  double s1_0;
  double s2_0;
  /**
   * Divide the price coupling by T like the j/k couplings.
   */
  bool a_scaled;
  double price_scale;
  double clearing_price;
} MsMfParams;

/**
 * One row of a mean-field trajectory.
 */
typedef struct MsMfRow {
  uint64_t t;
  double s1;
  double s2;
  double price;
} MsMfRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Build a periodic FCC lattice of `4 * l^3` sites.
 *
 * # Safety
 * `out` must point to writable storage for one pointer.
 */
enum MsStatus ms_graph_fcc(uint32_t l, struct MsGraph **out);

/**
 * Build a graph from `n_edges` undirected edges given as 2*n_edges site
 * indices (i0, j0, i1, j1, ...).
 *
 * # Safety
 * `edges` must point to `2 * n_edges` readable u32 values (may be null
 * only when `n_edges` is zero); `out` must be writable.
 */
enum MsStatus ms_graph_custom(const uint32_t *edges,
                              uintptr_t n_edges,
                              uintptr_t n_sites,
                              struct MsGraph **out);

/**
 * Number of sites; 0 for a null graph.
 *
 * # Safety
 * `graph` must be null or a live handle from a constructor.
 */
uintptr_t ms_graph_n_sites(const struct MsGraph *graph);

/**
 * Degree of one site; -1 on a null graph or out-of-range site.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
int64_t ms_graph_degree(const struct MsGraph *graph, uintptr_t site);

/**
 * # Safety
 * `graph` must be null or a live handle; it is consumed.
 */
void ms_graph_free(struct MsGraph *graph);

/**
 * Run the market and hand back the recorded series.
 *
 * # Safety
 * `graph` and `params` must be live pointers; `out` must be writable.
 */
enum MsStatus ms_run_market(const struct MsGraph *graph,
                            const struct MsRunParams *params,
                            struct MsSeries **out);

/**
 * Number of recorded rows (sweeps + 1); 0 for null.
 *
 * # Safety
 * `series` must be null or a live handle.
 */
uintptr_t ms_series_len(const struct MsSeries *series);

/**
 * Copy one row out of the series.
 *
 * # Safety
 * `series` must be null or a live handle; `out` must be writable.
 */
enum MsStatus ms_series_row(const struct MsSeries *series,
                            uintptr_t index,
                            struct MsSeriesRow *out);

/**
 * Time averages over rows `t >= discard`.
 *
 * # Safety
 * `series` must be null or a live handle; `out` must be writable.
 */
enum MsStatus ms_series_thermal_stats(const struct MsSeries *series,
                                      uint64_t discard,
                                      double temperature,
                                      struct MsThermalStats *out);

/**
 * # Safety
 * `series` must be null or a live handle; it is consumed.
 */
void ms_series_free(struct MsSeries *series);

/**
 * Brillouin response of a 2M+1 state spin.
 */
double ms_brillouin(double u, uint32_t m);

/**
 * Iterate the two-community map for `steps` steps.
 *
 * # Safety
 * `params` must be a live pointer; `out` must be writable.
 */
enum MsStatus ms_mf_run(const struct MsMfParams *params,
                        uint64_t steps,
                        struct MsMfTrajectory **out);

/**
 * Number of trajectory rows (steps + 1); 0 for null.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
uintptr_t ms_mf_len(const struct MsMfTrajectory *traj);

/**
 * Copy one trajectory row.
 *
 * # Safety
 * `traj` must be null or a live handle; `out` must be writable.
 */
enum MsStatus ms_mf_row(const struct MsMfTrajectory *traj, uintptr_t index, struct MsMfRow *out);

/**
 * # Safety
 * `traj` must be null or a live handle; it is consumed.
 */
void ms_mf_free(struct MsMfTrajectory *traj);

/**
 * Library version as a static NUL-terminated string; do not free.
 */
const char *ms_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus
