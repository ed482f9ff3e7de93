#ifndef JETCOUNT_H
#define JETCOUNT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum JcMethod {
  JC_METHOD_AUTO = 0,
  JC_METHOD_NAIVE = 1,
  JC_METHOD_TREE = 2,
} JcMethod;

typedef enum JcStatus {
  JC_STATUS_OK = 0,
  JC_STATUS_PARSE = 1,
  JC_STATUS_INVALID = 2,
  JC_STATUS_BUDGET = 3,
  JC_STATUS_REFUSED = 4,
  JC_STATUS_COVERAGE = 5,
  JC_STATUS_NULL_ARGUMENT = 6,
  JC_STATUS_UTF8 = 7,
  JC_STATUS_PANIC = 8,
} JcStatus;

/**
 * Parsed definition file.
 */
typedef struct JcDefs JcDefs;

typedef struct JcMorphism JcMorphism;

typedef struct JcScheme JcScheme;

/**
 * Work budget and prime floor; zero fields take the library defaults.
 */
typedef struct JcLimits {
  uint64_t budget;
  uint64_t prime_floor;
} JcLimits;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call on the same thread.
 */
const char *jc_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void jc_string_free(char *s);

/**
 * # Safety
 * `text` must be a valid C string and `out` writable.
 */
enum JcStatus jc_defs_parse(const char *text, struct JcDefs **out);

/**
 * # Safety
 * `defs` must be null or a handle from `jc_defs_parse`.
 */
void jc_defs_free(struct JcDefs *defs);

/**
 * Copies a scheme out of `defs`. A null `name` picks the only scheme.
 *
 * # Safety
 * Pointers must be valid; `name` may be null.
 */
enum JcStatus jc_defs_scheme(const struct JcDefs *defs, const char *name, struct JcScheme **out);

/**
 * # Safety
 * Pointers must be valid; `name` may be null.
 */
enum JcStatus jc_defs_morphism(const struct JcDefs *defs,
                               const char *name,
                               struct JcMorphism **out);

/**
 * # Safety
 * `x` must be null or a handle from `jc_defs_scheme`.
 */
void jc_scheme_free(struct JcScheme *x);

/**
 * # Safety
 * `phi` must be null or a handle from `jc_defs_morphism`.
 */
void jc_morphism_free(struct JcMorphism *phi);

/**
 * Equations of `J_k(X)`, one per line.
 *
 * # Safety
 * Pointers must be valid.
 */
enum JcStatus jc_jet_equations(const struct JcScheme *x, uint32_t k, char **out);

/**
 * `#X(Z/p^k)` as a decimal string.
 *
 * # Safety
 * Pointers must be valid.
 */
enum JcStatus jc_count_points(const struct JcScheme *x,
                              uint64_t p,
                              uint32_t k,
                              enum JcMethod method,
                              struct JcLimits limits,
                              char **out);

/**
 * g and h of one fiber as rational strings `num/den` (or integers).
 *
 * # Safety
 * Pointers must be valid; `y` must hold `y_len` entries.
 */
enum JcStatus jc_fiber_gh(const struct JcMorphism *phi,
                          const uint64_t *y,
                          size_t y_len,
                          uint64_t p,
                          uint32_t k,
                          struct JcLimits limits,
                          char **out_g,
                          char **out_h);

/**
 * Scans all fibers and returns the verdict document as JSON.
 *
 * # Safety
 * Pointers must be valid; `primes` must hold `n_primes` entries.
 */
enum JcStatus jc_diagnose_json(const struct JcMorphism *phi,
                               const uint64_t *primes,
                               size_t n_primes,
                               uint32_t k_max,
                               uint64_t seed,
                               uint64_t cap,
                               struct JcLimits limits,
                               char **out);

/**
 * Supremum of a constructible function at `q = q_num/q_den`, as JSON.
 *
 * # Safety
 * Pointers must be valid.
 */
enum JcStatus jc_presburger_sup(const char *expr, int64_t q_num, int64_t q_den, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JETCOUNT_H */
