#ifndef BIDISC_H
#define BIDISC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BidiscCrownMode {
  BIDISC_CROWN_MODE_AUTO = 0,
  BIDISC_CROWN_MODE_EXACT = 1,
  BIDISC_CROWN_MODE_HEURISTIC = 2,
} BidiscCrownMode;

typedef enum BidiscStatus {
  BIDISC_STATUS_OK = 0,
  BIDISC_STATUS_NULL_POINTER = 1,
  BIDISC_STATUS_INVALID_ARGUMENT = 2,
  BIDISC_STATUS_PARSE_ERROR = 3,
  BIDISC_STATUS_CONSTRUCTION_FAILED = 4,
  // The call completed but its result does not meet the requested bound.
  BIDISC_STATUS_BOUND_UNMET = 5,
  BIDISC_STATUS_PANIC = 6,
} BidiscStatus;

// Opaque 1-factorization handle.
typedef struct BidiscFactorization BidiscFactorization;

// Opaque signing handle.
typedef struct BidiscSigning BidiscSigning;

// Switcher counts: `s = s1 + s2`.
typedef struct BidiscCensus {
  size_t n;
  uint64_t s;
  uint64_t s1;
  uint64_t s2;
} BidiscCensus;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null if none. The
// pointer stays valid until the next failing call on the same thread.
const char *bidisc_last_error_message(void);

// Creates a signing from `n * n` row-major entries, each `-1` or `+1`.
//
// # Safety
// `entries` must point to `n * n` readable values and `out` must be valid
// for writes.
enum BidiscStatus bidisc_signing_new(size_t n, const int8_t *entries, struct BidiscSigning **out);

// Parses a signing file (line 1 `n`, then `n` lines over `{+,-}`).
//
// # Safety
// `text` must be a nul-terminated string and `out` valid for writes.
enum BidiscStatus bidisc_signing_parse(const char *text, struct BidiscSigning **out);

// Releases a signing. Null is ignored.
//
// # Safety
// `signing` must be null or a handle from this library not yet freed.
void bidisc_signing_free(struct BidiscSigning *signing);

// Order `n` of the signing, or 0 for null.
//
// # Safety
// `signing` must be null or a live handle.
size_t bidisc_signing_n(const struct BidiscSigning *signing);

// # Safety
// `signing` must be a live handle and `out` valid for writes.
enum BidiscStatus bidisc_signing_census(const struct BidiscSigning *signing,
                                        struct BidiscCensus *out);

// Discrepancy `|sum of entries| / n^2`.
//
// # Safety
// `signing` must be a live handle; `num` and `den` valid for writes.
enum BidiscStatus bidisc_signing_disc(const struct BidiscSigning *signing,
                                      int64_t *num,
                                      int64_t *den);

// Cyclic-shift factorization for signings with large discrepancy. Returns
// `BoundUnmet` (with a valid handle in `out`) when some matching misses
// the concentration bound.
//
// # Safety
// `signing` must be a live handle and `out` valid for writes.
enum BidiscStatus bidisc_factorize_cyclic(const struct BidiscSigning *signing,
                                          uint64_t seed,
                                          size_t max_tries,
                                          struct BidiscFactorization **out);

// Switching factorization for signings with many switchers. `eta_den = 0`
// uses the measured switcher density. Returns `BoundUnmet` (with a valid
// handle in `out`) when some matching misses `eta / 8 - 3 / n`.
//
// # Safety
// `signing` must be a live handle and `out` valid for writes.
enum BidiscStatus bidisc_factorize_switcher(const struct BidiscSigning *signing,
                                            int64_t eta_num,
                                            int64_t eta_den,
                                            enum BidiscCrownMode crown_mode,
                                            uint64_t seed,
                                            struct BidiscFactorization **out);

// Number of matchings (equal to `n`), or 0 for null.
//
// # Safety
// `f` must be null or a live handle.
size_t bidisc_factorization_n(const struct BidiscFactorization *f);

// Writes matching `t` into `out[0..n]`: `x_i` is matched to `y_{out[i]}`.
//
// # Safety
// `f` must be a live handle and `out` valid for `n` writes.
enum BidiscStatus bidisc_factorization_matching(const struct BidiscFactorization *f,
                                                size_t t,
                                                size_t *out);

// Smallest matching discrepancy of `f` under `signing`.
//
// # Safety
// Handles must be live; `num` and `den` valid for writes.
enum BidiscStatus bidisc_factorization_min_disc(const struct BidiscFactorization *f,
                                                const struct BidiscSigning *signing,
                                                int64_t *num,
                                                int64_t *den);

// Releases a factorization. Null is ignored.
//
// # Safety
// `f` must be null or a handle from this library not yet freed.
void bidisc_factorization_free(struct BidiscFactorization *f);

// Runs the classifier for `epsilon = eps_num / eps_den` and writes its
// certificate as a JSON string to `json_out`, to be released with
// [`bidisc_string_free`]. Returns `BoundUnmet` (with the JSON written) when
// no branch verified.
//
// # Safety
// `signing` must be a live handle and `json_out` valid for writes.
enum BidiscStatus bidisc_certify(const struct BidiscSigning *signing,
                                 int64_t eps_num,
                                 int64_t eps_den,
                                 uint64_t seed,
                                 char **json_out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void bidisc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BIDISC_H */
