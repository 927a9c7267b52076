/* C interface to the periodic Lax hierarchy verification engine. */

#ifndef FKT_H
#define FKT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every API function.
typedef enum FktStatus {
  // The call succeeded.
  FKT_STATUS_OK = 0,
  // An argument was out of range or malformed.
  FKT_STATUS_INVALID_ARGUMENT = 1,
  // The request names a type or feature outside the supported set.
  FKT_STATUS_UNSUPPORTED = 2,
  // An internal consistency check failed.
  FKT_STATUS_INTERNAL = 3,
  // A required pointer argument was null.
  FKT_STATUS_NULL_POINTER = 4,
} FktStatus;

// Opaque handle owning a root system and everything derived from it.
typedef struct FktEngine FktEngine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates an engine for the simple type `<family><rank>`, e.g. ('B', 3).
// On success writes the handle to `out_engine`; free it with
// [`fkt_engine_free`].
//
// # Safety
// `out_engine` must be a valid pointer to writable memory.
enum FktStatus fkt_engine_new(char family, uint32_t rank, struct FktEngine **out_engine);

// Releases an engine handle. Passing null is a no-op.
//
// # Safety
// `engine` must be null or a pointer obtained from [`fkt_engine_new`]
// that has not already been freed.
void fkt_engine_free(struct FktEngine *engine);

// Writes the dimension of the algebra to `out`.
//
// # Safety
// `engine` must be a live handle and `out` a valid writable pointer.
enum FktStatus fkt_engine_dim(const struct FktEngine *engine, uint32_t *out);

// Writes the rank of the algebra to `out`.
//
// # Safety
// `engine` must be a live handle and `out` a valid writable pointer.
enum FktStatus fkt_engine_rank(const struct FktEngine *engine, uint32_t *out);

// Writes the number of members in the spectral invariant family,
// (dim + rank)/2, to `out`.
//
// # Safety
// `engine` must be a live handle and `out` a valid writable pointer.
enum FktStatus fkt_engine_family_size(const struct FktEngine *engine, uint32_t *out);

// Writes the largest exponent m_top to `out`; levels 1..=m_top are
// valid truncations.
//
// # Safety
// `engine` must be a live handle and `out` a valid writable pointer.
enum FktStatus fkt_engine_top_exponent(const struct FktEngine *engine, uint32_t *out);

// Verifies the height-graded block ranks and the bracket rank at the
// marker point, writing 1 to `out_pass` if both certificates hold.
//
// # Safety
// `engine` must be a live handle and `out_pass` a valid writable pointer.
enum FktStatus fkt_check_ranks(const struct FktEngine *engine, uint8_t *out_pass);

// Checks that all family members pairwise Poisson-commute exactly at
// `trials` random rational points drawn from `seed`.
//
// # Safety
// `engine` must be a live handle and `out_pass` a valid writable pointer.
enum FktStatus fkt_check_involution(const struct FktEngine *engine,
                                    uint32_t trials,
                                    uint64_t seed,
                                    uint8_t *out_pass);

// Checks that the deepest extractions annihilate the bracket and stay
// independent.
//
// # Safety
// `engine` must be a live handle and `out_pass` a valid writable pointer.
enum FktStatus fkt_check_casimirs(const struct FktEngine *engine,
                                  uint32_t trials,
                                  uint64_t seed,
                                  uint8_t *out_pass);

// Checks that the family Jacobian attains rank (dim + rank)/2 at the
// marker point and at random points.
//
// # Safety
// `engine` must be a live handle and `out_pass` a valid writable pointer.
enum FktStatus fkt_check_independence(const struct FktEngine *engine,
                                      uint64_t seed,
                                      uint8_t *out_pass);

// Tests the level-`k` truncated family and writes 1 to `out_consistent`
// when independence, Casimir count, and the Liouville count all hold on
// that chart.
//
// # Safety
// `engine` must be a live handle and `out_consistent` a valid writable
// pointer.
enum FktStatus fkt_tk_consistent(const struct FktEngine *engine,
                                 uint32_t k,
                                 uint32_t trials,
                                 uint64_t seed,
                                 uint8_t *out_consistent);

// Runs one named check suite ("roots", "rank-check", "invariants",
// "involution", "casimirs", "independence", "flow", "tk-check") and
// returns the full JSON report. For "tk-check", `k` selects the level
// and 0 means all levels; other commands ignore `k`. Free the returned
// string with [`fkt_string_free`].
//
// # Safety
// `engine` must be a live handle, `command` a NUL-terminated string,
// and `out_json` a valid writable pointer.
enum FktStatus fkt_report_json(const struct FktEngine *engine,
                               const char *command,
                               uint32_t k,
                               uint32_t trials,
                               uint64_t seed,
                               char **out_json);

// Releases a string returned by this library. Passing null is a no-op.
//
// # Safety
// `s` must be null or a pointer returned by an `fkt_*` function that
// has not already been freed.
void fkt_string_free(char *s);

// Returns a static description of a status code.
const char *fkt_status_message(enum FktStatus status);

// Returns the message attached to the most recent failure on this
// thread. The pointer stays valid until the next library call on the
// same thread; do not free it.
const char *fkt_last_error_message(void);

// Returns the library version as a static string.
const char *fkt_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FKT_H */
