#ifndef STRATEGIC_PRICING_H
#define STRATEGIC_PRICING_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SpStatus {
  SP_STATUS_OK = 0,
  SP_STATUS_NULL_POINTER = 1,
  SP_STATUS_INVALID_PARAMETER = 2,
  SP_STATUS_INVALID_INPUT = 3,
  SP_STATUS_PARSE = 4,
  SP_STATUS_NO_BRACKET = 5,
  SP_STATUS_UTILITY_CONDITION = 6,
  SP_STATUS_IO = 7,
  SP_STATUS_PANIC = 8,
} SpStatus;

typedef enum SpRegion {
  SP_REGION_I = 1,
  SP_REGION_II = 2,
  SP_REGION_III = 3,
  SP_REGION_IV = 4,
  SP_REGION_V = 5,
  SP_REGION_SKEWED = 6,
} SpRegion;

typedef enum SpMechanism {
  SP_MECHANISM_NLP = 0,
  SP_MECHANISM_ULP = 1,
  SP_MECHANISM_SLP = 2,
} SpMechanism;

/**
 * Social graph with preferences.
 */
typedef struct SpGraph SpGraph;

/**
 * Market parameters.
 */
typedef struct SpMarket SpMarket;

/**
 * Solved two-buyer equilibrium.
 */
typedef struct SpOutcome SpOutcome;

typedef struct SpWelfare {
  double revenue_no_learning;
  double revenue_undisclosed;
  double revenue_strategic;
  double payoff_undisclosed;
  double payoff_strategic;
  double gain_strategic_vs_no;
  double loss_awareness;
  double known_low_gain;
  bool buyer_worse_off;
} SpWelfare;

typedef struct SpContinuousOutcome {
  uint8_t case_id;
  double rho_star;
  double p1_on_signal1;
  double p1_on_signal0;
  /**
   * Second prices indexed `[signal][first buyer bought]`.
   */
  double p2[2][2];
} SpContinuousOutcome;

typedef struct SpEstimate {
  double mean;
  double std_err;
} SpEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string. The
 * pointer stays valid until the next call on this thread.
 */
const char *sp_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sp_version(void);

/**
 * Creates market parameters.
 *
 * # Safety
 * `out` must be null or point to writable storage for one pointer.
 */
enum SpStatus sp_market_new(double v_h,
                            double v_l,
                            double l,
                            double c,
                            double r,
                            double alpha,
                            struct SpMarket **out);

/**
 * # Safety
 * `market` must be null or a handle from [`sp_market_new`] not yet freed.
 */
void sp_market_free(struct SpMarket *market);

/**
 * Region of the uniform-prior model.
 *
 * # Safety
 * `out` must be null or point to writable storage for one `SpRegion`.
 */
enum SpStatus sp_classify_region(double v_h, double v_l, double l, enum SpRegion *out);

/**
 * Solves the two-buyer equilibrium.
 *
 * # Safety
 * `market` must be a live handle; `out` must point to storage for one pointer.
 */
enum SpStatus sp_solve(const struct SpMarket *market, struct SpOutcome **out);

/**
 * # Safety
 * `outcome` must be null or a handle from [`sp_solve`] not yet freed.
 */
void sp_outcome_free(struct SpOutcome *outcome);

/**
 * # Safety
 * `outcome` must be a live handle; `out` must be writable.
 */
enum SpStatus sp_outcome_region(const struct SpOutcome *outcome, enum SpRegion *out);

/**
 * # Safety
 * `outcome` must be a live handle; `out` must be writable.
 */
enum SpStatus sp_outcome_rho(const struct SpOutcome *outcome, double *out);

/**
 * Seller mixing weight; `has_beta` is false where the seller plays pure.
 *
 * # Safety
 * `outcome` must be a live handle; `beta` and `has_beta` must be writable.
 */
enum SpStatus sp_outcome_beta(const struct SpOutcome *outcome, double *beta, bool *has_beta);

/**
 * # Safety
 * `outcome` must be a live handle; `out` must be writable.
 */
enum SpStatus sp_outcome_belief_s(const struct SpOutcome *outcome, double *out);

/**
 * Revenue and payoff comparison under the uniform prior.
 *
 * # Safety
 * `market` must be a live handle; `out` must be writable.
 */
enum SpStatus sp_welfare(const struct SpMarket *market, struct SpWelfare *out);

/**
 * Equilibrium with valuations uniform on `[0, v_bar]`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SpStatus sp_continuous_solve(double v_bar, double l, struct SpContinuousOutcome *out);

/**
 * Parses an edge list from a NUL-terminated string.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` must be writable.
 */
enum SpStatus sp_graph_parse(const char *text, struct SpGraph **out);

/**
 * The bundled 100-node graph.
 *
 * # Safety
 * `out` must be writable.
 */
enum SpStatus sp_graph_bundled(struct SpGraph **out);

/**
 * # Safety
 * `graph` must be null or a live graph handle.
 */
void sp_graph_free(struct SpGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle; `nodes` and `edges` must be writable.
 */
enum SpStatus sp_graph_size(const struct SpGraph *graph, size_t *nodes, size_t *edges);

/**
 * Draws preferences in place.
 *
 * # Safety
 * `graph` must be a live handle not used concurrently.
 */
enum SpStatus sp_graph_sample_preferences(struct SpGraph *graph, double alpha, uint64_t seed);

/**
 * Mean revenue of one mechanism over `shuffles` replications.
 *
 * # Safety
 * `graph` and `market` must be live handles; `out` must be writable.
 */
enum SpStatus sp_mechanism_revenue(const struct SpGraph *graph,
                                   const struct SpMarket *market,
                                   enum SpMechanism mechanism,
                                   uint64_t shuffles,
                                   uint64_t seed,
                                   struct SpEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STRATEGIC_PRICING_H */
