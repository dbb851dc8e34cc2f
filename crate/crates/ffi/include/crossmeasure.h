#ifndef CROSSMEASURE_H
#define CROSSMEASURE_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CmStatus {
  CM_STATUS_OK = 0,
  CM_STATUS_NULL_POINTER = 1,
  CM_STATUS_INVALID_UTF8 = 2,
  CM_STATUS_PARSE = 3,
  CM_STATUS_INVALID_ARGUMENT = 4,
  CM_STATUS_PRECONDITION = 5,
  CM_STATUS_SIZE_CAP = 6,
  /**
   * The call succeeded and the answer is negative (an infeasible certificate,
   * or an oracle maximum below `p1 p2`).
   */
  CM_STATUS_FALSE = 7,
  CM_STATUS_PANIC = 8,
} CmStatus;

/**
 * Opaque family of subsets of `[n]`.
 */
typedef struct CmFamily CmFamily;

/**
 * Opaque probability vector.
 */
typedef struct CmProbabilityVector CmProbabilityVector;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse `"1/2,1/3"` into a new vector handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CmStatus cm_pv_parse(const char *text, struct CmProbabilityVector **out);

/**
 * # Safety
 * `pv` must come from `cm_pv_parse` and not be used afterwards. Null is ignored.
 */
void cm_pv_free(struct CmProbabilityVector *pv);

/**
 * Number of coordinates, or 0 for a null handle.
 *
 * # Safety
 * `pv` must be null or a live handle.
 */
uintptr_t cm_pv_len(const struct CmProbabilityVector *pv);

/**
 * Parse a family literal such as `[[1,2],[3]]` over `[n]`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CmStatus cm_family_from_json(uintptr_t n, const char *json, struct CmFamily **out);

/**
 * # Safety
 * `f` must come from `cm_family_from_json` and not be used afterwards. Null is ignored.
 */
void cm_family_free(struct CmFamily *f);

/**
 * Number of members, or 0 for a null handle.
 *
 * # Safety
 * `f` must be null or a live handle.
 */
uintptr_t cm_family_len(const struct CmFamily *f);

/**
 * # Safety
 * `f` must be a live handle and `out` a valid pointer.
 */
enum CmStatus cm_family_to_json(const struct CmFamily *f, char **out);

/**
 * Exact measure of `f` as a `"num/den"` string.
 *
 * # Safety
 * Handles must be live and `out` a valid pointer.
 */
enum CmStatus cm_measure(const struct CmProbabilityVector *pv,
                         const struct CmFamily *f,
                         char **out);

/**
 * # Safety
 * Handles must be live and `out` a valid pointer.
 */
enum CmStatus cm_is_cross_intersecting(const struct CmFamily *a,
                                       const struct CmFamily *b,
                                       bool *out);

/**
 * Verify a certificate (`third` selects the one for entries at most 1/3;
 * otherwise `ε2 = 0`) and write the JSON report. Returns `CM_STATUS_FALSE`
 * with the report still written when the certificate is infeasible.
 *
 * # Safety
 * Handles must be live and `out` a valid pointer.
 */
enum CmStatus cm_certify(const struct CmProbabilityVector *pv1,
                         const struct CmProbabilityVector *pv2,
                         bool third,
                         char **out);

/**
 * Exhaustive oracle (`n ≤ 5`); writes the extremal report as JSON. Returns
 * `CM_STATUS_FALSE` when the maximum differs from `p1 p2`.
 *
 * # Safety
 * Handles must be live and `out` a valid pointer.
 */
enum CmStatus cm_oracle(const struct CmProbabilityVector *pv1,
                        const struct CmProbabilityVector *pv2,
                        char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. Null is ignored.
 */
void cm_string_free(char *s);

/**
 * Message for the last failed call on this thread. The pointer stays valid
 * until the next failing call on the same thread.
 */
const char *cm_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CROSSMEASURE_H */
