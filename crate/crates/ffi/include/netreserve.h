#ifndef NETRESERVE_H
#define NETRESERVE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum NrStatus {
  NR_STATUS_OK = 0,
  NR_STATUS_NULL_POINTER = 1,
  NR_STATUS_INVALID_ARGUMENT = 2,
  NR_STATUS_OUT_OF_RANGE = 3,
  NR_STATUS_INVALID_CONFIG = 4,
  NR_STATUS_IO = 5,
  NR_STATUS_RUNTIME = 6,
  NR_STATUS_BUFFER_TOO_SMALL = 7,
  NR_STATUS_PANIC = 8,
} NrStatus;

/**
 * Softmax bandit baseline.
 */
typedef struct NrBandit NrBandit;

/**
 * Full-information exponential weights.
 */
typedef struct NrHedge NrHedge;

/**
 * Network instance: action space, request bounds and cost model.
 */
typedef struct NrModel NrModel;

/**
 * Per-component cost of one slot.
 */
typedef struct NrCost {
  double reservation;
  double transfer;
  double violation;
  double total;
} NrCost;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *nr_version(void);

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next call into the library from this thread.
 */
const char *nr_last_error_message(void);

/**
 * Builds the three-server reference instance.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum NrStatus nr_model_three_server(struct NrModel **out);

/**
 * Builds the instance described by the TOML experiment config `text`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum NrStatus nr_model_from_toml(const char *text, struct NrModel **out);

/**
 * # Safety
 * `model` must be NULL or a handle from this library not yet freed.
 */
void nr_model_free(struct NrModel *model);

/**
 * Number of servers, or 0 for a NULL handle.
 *
 * # Safety
 * `model` must be NULL or a live handle.
 */
size_t nr_model_servers(const struct NrModel *model);

/**
 * Number of reservation vectors, or 0 for a NULL handle.
 *
 * # Safety
 * `model` must be NULL or a live handle.
 */
size_t nr_model_action_count(const struct NrModel *model);

/**
 * Exact bound on each cost component over all reservation and request pairs.
 *
 * # Safety
 * `model` must be a live handle and `out` valid for writes.
 */
enum NrStatus nr_model_theta(const struct NrModel *model, double *out);

/**
 * Writes the reservation vector with index `action` into `out[0..len]`,
 * where `len` must equal the number of servers.
 *
 * # Safety
 * `model` must be a live handle and `out` valid for `len` writes.
 */
enum NrStatus nr_model_decode_action(const struct NrModel *model,
                                     size_t action,
                                     int64_t *out,
                                     size_t len);

/**
 * Cost of reserving `reservation` when `request` arrives, with the optimal
 * job transfer. Both arrays hold `len` = number of servers entries.
 *
 * # Safety
 * `model` must be a live handle, the arrays valid for `len` reads and `out`
 * valid for writes.
 */
enum NrStatus nr_model_cost(const struct NrModel *model,
                            const int64_t *reservation,
                            const int64_t *request,
                            size_t len,
                            struct NrCost *out);

/**
 * Optimal job transfer for `(reservation, request)`. The plan is written
 * row-major into `plan[0..len*len]` (`plan[i*len + j]` jobs from server `i`
 * to server `j`); `out.reservation` is left at zero.
 *
 * # Safety
 * `model` must be a live handle, the vectors valid for `len` reads, `plan`
 * valid for `len * len` writes and `out` valid for writes.
 */
enum NrStatus nr_solve_transfer(const struct NrModel *model,
                                const int64_t *reservation,
                                const int64_t *request,
                                size_t len,
                                uint32_t *plan,
                                struct NrCost *out);

/**
 * High-probability regret bound for horizon `horizon`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum NrStatus nr_regret_bound(size_t horizon,
                              double theta,
                              size_t action_count,
                              double delta,
                              double *out);

/**
 * Exponential weights over `action_count` actions with step size `eta` and
 * discount `discount` (1 for none).
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum NrStatus nr_hedge_new(size_t action_count, double eta, double discount, struct NrHedge **out);

/**
 * # Safety
 * `hedge` must be NULL or a live handle.
 */
void nr_hedge_free(struct NrHedge *hedge);

/**
 * Charges every action its cost for one slot.
 *
 * # Safety
 * `hedge` must be a live handle and `costs` valid for `len` reads.
 */
enum NrStatus nr_hedge_update(struct NrHedge *hedge, const double *costs, size_t len);

/**
 * Writes the current action probabilities into `out[0..len]`.
 *
 * # Safety
 * `hedge` must be a live handle and `out` valid for `len` writes.
 */
enum NrStatus nr_hedge_probabilities(const struct NrHedge *hedge, double *out, size_t len);

/**
 * Inverse-CDF draw for a caller-supplied uniform `u` in `[0, 1)`.
 *
 * # Safety
 * `hedge` must be a live handle and `out` valid for writes.
 */
enum NrStatus nr_hedge_sample(const struct NrHedge *hedge, double u, size_t *out);

/**
 * Softmax bandit over `action_count` actions.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum NrStatus nr_bandit_new(size_t action_count,
                            double beta,
                            double tau,
                            double q_init,
                            struct NrBandit **out);

/**
 * # Safety
 * `bandit` must be NULL or a live handle.
 */
void nr_bandit_free(struct NrBandit *bandit);

/**
 * Moves the value of `action` toward `reward`.
 *
 * # Safety
 * `bandit` must be a live handle.
 */
enum NrStatus nr_bandit_update(struct NrBandit *bandit, size_t action, double reward);

/**
 * Writes the current action probabilities into `out[0..len]`.
 *
 * # Safety
 * `bandit` must be a live handle and `out` valid for `len` writes.
 */
enum NrStatus nr_bandit_probabilities(const struct NrBandit *bandit, double *out, size_t len);

/**
 * Writes the value estimates into `out[0..len]`.
 *
 * # Safety
 * `bandit` must be a live handle and `out` valid for `len` writes.
 */
enum NrStatus nr_bandit_values(const struct NrBandit *bandit, double *out, size_t len);

/**
 * Runs every (policy, seed) pair of the config file at `path`, like
 * `netreserve run`. `seeds` (length `n_seeds`, may be NULL when zero) and
 * `outdir` (may be NULL) override the config.
 *
 * # Safety
 * `path` and a non-NULL `outdir` must be NUL-terminated strings; `seeds`
 * must be valid for `n_seeds` reads.
 */
enum NrStatus nr_run_config_file(const char *path,
                                 const uint64_t *seeds,
                                 size_t n_seeds,
                                 const char *outdir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NETRESERVE_H */
