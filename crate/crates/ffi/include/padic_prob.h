#ifndef PADIC_PROB_H
#define PADIC_PROB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Valuation reported for zero.
 */
#define PP_VALUATION_INFINITE INT64_MAX

/**
 * Status codes; the nonzero values agree with the CLI exit codes.
 */
typedef enum PpStatus {
  PP_STATUS_OK = 0,
  PP_STATUS_IO = 1,
  PP_STATUS_PARSE = 2,
  PP_STATUS_HYPOTHESIS = 3,
  PP_STATUS_INSUFFICIENT_DATA = 4,
  PP_STATUS_DOMAIN = 5,
  PP_STATUS_CONDITIONING_ON_NULL = 6,
  PP_STATUS_RANGE = 7,
  PP_STATUS_OVERLAPPING_PIECES = 8,
  PP_STATUS_NO_RING_STRUCTURE = 9,
  PP_STATUS_NOT_INVERTIBLE = 10,
  PP_STATUS_REGION_NOT_SIGNIFICANT = 11,
  PP_STATUS_NOT_A_FIELD = 12,
  PP_STATUS_OSCILLATION_MISSING = 13,
  PP_STATUS_NULL_POINTER = 100,
  PP_STATUS_UTF8 = 101,
  PP_STATUS_PANIC = 102,
} PpStatus;

/**
 * Region of the randomness test.
 */
typedef enum PpMode {
  PP_MODE_SPHERE = 0,
  PP_MODE_RESIDUE = 1,
} PpMode;

/**
 * Outcome of the sphere randomness test.
 */
typedef enum PpDecision {
  PP_DECISION_NOT_REJECTED = 0,
  PP_DECISION_REJECTED = 1,
  /**
   * Rejected with a hit at every checkpoint from k_ε on.
   */
  PP_DECISION_REJECTED_PERSISTENT = 2,
} PpDecision;

/**
 * Opaque label sequence.
 */
typedef struct PpCollective PpCollective;

/**
 * Opaque theorem-verification report.
 */
typedef struct PpReport PpReport;

/**
 * Opaque index sequence.
 */
typedef struct PpSelector PpSelector;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the next call.
 */
const char *pp_last_error_message(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void pp_string_free(char *s);

/**
 * `v_p(x)` and `|x|_p` of a rational `"n"` or `"n/d"`. `abs_out` receives a
 * string to release with [`pp_string_free`] and may be null.
 *
 * # Safety
 * `x` must be a NUL-terminated string; outputs must be valid or null as documented.
 */
enum PpStatus pp_valuation(uint64_t prime, const char *x, int64_t *valuation_out, char **abs_out);

/**
 * Parses a selector such as `"2+1*p^k"`, `"trunc(-1)"` or `"list:4,10,28"`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `selector_out` valid.
 */
enum PpStatus pp_selector_parse(const char *spec, uint64_t prime, struct PpSelector **selector_out);

/**
 * # Safety
 * `s` must come from [`pp_selector_parse`] or be null.
 */
void pp_selector_free(struct PpSelector *s);

/**
 * A binary collective from `len` labels, each 0 or 1.
 *
 * # Safety
 * `bits` must point to `len` readable bytes.
 */
enum PpStatus pp_collective_from_bits(const uint8_t *bits,
                                      size_t len,
                                      struct PpCollective **collective_out);

/**
 * A binary collective read from a text file of `0`/`1` characters.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `collective_out` valid.
 */
enum PpStatus pp_collective_from_file(const char *path, struct PpCollective **collective_out);

/**
 * # Safety
 * `c` must come from this library or be null.
 */
void pp_collective_free(struct PpCollective *c);

/**
 * Ball probabilities of fair binomial sums along a selector converging to `m`.
 * A negative `threshold` keeps the default.
 *
 * # Safety
 * `selector` must be a live handle and `report_out` valid.
 */
enum PpStatus pp_verify_thm31(uint64_t prime,
                              uint64_t m,
                              uint64_t r,
                              uint32_t l,
                              const struct PpSelector *selector,
                              uint32_t kmax,
                              int64_t threshold,
                              struct PpReport **report_out);

/**
 * As [`pp_verify_thm31`] with the selector converging to `prime`.
 *
 * # Safety
 * `selector` must be a live handle and `report_out` valid.
 */
enum PpStatus pp_verify_thm32(uint64_t prime,
                              uint64_t r,
                              uint32_t l,
                              const struct PpSelector *selector,
                              uint32_t kmax,
                              int64_t threshold,
                              struct PpReport **report_out);

/**
 * Number of trace rows; 0 for a null handle.
 *
 * # Safety
 * `report` must be a live handle or null.
 */
size_t pp_report_len(const struct PpReport *report);

/**
 * Whether the trace passed the convergence check.
 *
 * # Safety
 * `report` must be a live handle or null.
 */
bool pp_report_converging(const struct PpReport *report);

/**
 * Row `i`: `k`, `N_k`, the distance valuation to the limit, and the exact
 * value as `"num/den"` (release with [`pp_string_free`]; may be null).
 *
 * # Safety
 * `report` must be a live handle; outputs must be valid or null as documented.
 */
enum PpStatus pp_report_row(const struct PpReport *report,
                            size_t i,
                            uint32_t *k_out,
                            uint64_t *n_out,
                            int64_t *vp_out,
                            char **value_out);

/**
 * Summary JSON of the report; release with [`pp_string_free`]. Null for a null handle.
 *
 * # Safety
 * `report` must be a live handle or null.
 */
char *pp_report_json(const struct PpReport *report);

/**
 * # Safety
 * `r` must come from this library or be null.
 */
void pp_report_free(struct PpReport *r);

/**
 * The randomness test with ε = p^-eps_exp at checkpoints `k = 1..kmax`.
 *
 * # Safety
 * Handles must be live; `decision_out` valid; `k_eps_out` valid or null.
 */
enum PpStatus pp_randomness_test(const struct PpCollective *omega,
                                 const struct PpSelector *selector,
                                 uint32_t l,
                                 uint64_t r,
                                 int64_t eps_exp,
                                 uint32_t kmax,
                                 enum PpMode mode,
                                 enum PpDecision *decision_out,
                                 uint32_t *k_eps_out);

/**
 * Depth-`depth` Riemann sum of the digit-weight map `Z_q -> Q_p` against the
 * uniform measure, as JSON `{depth, value, error_exponent}`.
 *
 * # Safety
 * `json_out` must be valid.
 */
enum PpStatus pp_integrate_digit_weight(uint64_t q, uint64_t prime, size_t depth, char **json_out);

/**
 * Finite check that the first `m_max` Mahler coefficients of cosh z have `|·|_p <= 1`.
 *
 * # Safety
 * `bounded_out` must be valid.
 */
enum PpStatus pp_gamma1_bounded(uint64_t prime, size_t m_max, bool *bounded_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PADIC_PROB_H */
