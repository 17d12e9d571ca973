/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef BUDGET_FLOW_H
#define BUDGET_FLOW_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum BfStatus {
  BF_STATUS_OK = 0,
  BF_STATUS_NULL_POINTER = 1,
  BF_STATUS_INVALID_UTF8 = 2,
  BF_STATUS_PARSE = 3,
  BF_STATUS_INVALID_ARGUMENT = 4,
  BF_STATUS_SOLVE = 5,
  BF_STATUS_OUT_OF_RANGE = 6,
  BF_STATUS_BUFFER_TOO_SMALL = 7,
  BF_STATUS_TOO_LARGE = 8,
  BF_STATUS_PANIC = 9,
} BfStatus;

/**
 * Opaque parsed instance.
 */
typedef struct BfInstance BfInstance;

/**
 * Opaque solver result; owns a copy of its instance.
 */
typedef struct BfSolution BfSolution;

/**
 * Solver options. `epsilon_num / epsilon_den` must lie strictly between 0 and 1.
 */
typedef struct BfOptions {
  int64_t epsilon_num;
  int64_t epsilon_den;
  /**
   * Non-zero selects floating-point mode with tolerance `eta`.
   */
  uint8_t float_mode;
  double eta;
  /**
   * Zero means no limit.
   */
  uint64_t max_phases;
} BfOptions;

/**
 * Scalar summary of a solution.
 */
typedef struct BfSummary {
  uint8_t certificate_passed;
  uint8_t rigorous;
  uint8_t terminated;
  double primal;
  double dual;
  uint64_t iterations;
  uint64_t beta_rises;
  uint64_t beta_activations;
} BfSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Options with ε = 1/4, exact arithmetic and no phase limit.
 */
struct BfOptions bf_options_default(void);

/**
 * Static description of a status code.
 */
const char *bf_status_str(enum BfStatus status);

/**
 * Copies the last error message of this thread into `buf`.
 *
 * # Safety
 * `buf` must be null or valid for `cap` bytes; `needed` must be null or valid.
 */
enum BfStatus bf_last_error(char *buf, size_t cap, size_t *needed);

/**
 * Parses a NUL-terminated instance text.
 *
 * # Safety
 * `text` must be a valid C string and `out` a valid pointer.
 */
enum BfStatus bf_instance_parse(const char *text, struct BfInstance **out);

/**
 * # Safety
 * `inst` must be null or a handle from `bf_instance_parse` not yet freed.
 */
void bf_instance_free(struct BfInstance *inst);

/**
 * Source, sink and edge counts.
 *
 * # Safety
 * `inst` must be a live handle; the out pointers must be null or valid.
 */
enum BfStatus bf_instance_dims(const struct BfInstance *inst, size_t *n, size_t *m, size_t *edges);

/**
 * Runs the solver; on success `*out` owns a new solution handle.
 *
 * # Safety
 * `inst` must be a live handle, `opts` null (defaults) or valid, `out` valid.
 */
enum BfStatus bf_solve(const struct BfInstance *inst,
                       const struct BfOptions *opts,
                       struct BfSolution **out);

/**
 * # Safety
 * `sol` must be null or a handle from `bf_solve` not yet freed.
 */
void bf_solution_free(struct BfSolution *sol);

/**
 * # Safety
 * `sol` must be a live handle and `out` valid.
 */
enum BfStatus bf_solution_summary(const struct BfSolution *sol, struct BfSummary *out);

/**
 * Flow on edge `edge` (0-based) as a double.
 *
 * # Safety
 * `sol` must be a live handle and `out` valid.
 */
enum BfStatus bf_solution_flow(const struct BfSolution *sol, size_t edge, double *out);

/**
 * Exact primal value as `num/den`.
 *
 * # Safety
 * `sol` must be a live handle; `buf` null or valid for `cap` bytes; `needed` null or valid.
 */
enum BfStatus bf_solution_primal_exact(const struct BfSolution *sol,
                                       char *buf,
                                       size_t cap,
                                       size_t *needed);

/**
 * The full solution file text, as written by `budget-flow solve`.
 *
 * Call with a null `buf` to learn the size.
 *
 * # Safety
 * `sol` must be a live handle; `buf` null or valid for `cap` bytes; `needed` null or valid.
 */
enum BfStatus bf_solution_text(const struct BfSolution *sol, char *buf, size_t cap, size_t *needed);

/**
 * Exact LP optimum of a small instance, as `num/den`.
 *
 * # Safety
 * `inst` must be a live handle; `buf` null or valid for `cap` bytes; `needed` null or valid.
 */
enum BfStatus bf_oracle_value(const struct BfInstance *inst, char *buf, size_t cap, size_t *needed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BUDGET_FLOW_H */
