/* C interface to the carfock fermionic Fock-state library. */

#ifndef CARFOCK_H
#define CARFOCK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Occupation-parity classification of a pure state.
 */
typedef enum CfParity {
  CF_PARITY_EVEN = 0,
  CF_PARITY_ODD = 1,
  CF_PARITY_MIXED = 2,
} CfParity;

/**
 * Status code returned by every entry point.
 */
typedef enum CfStatus {
  CF_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  CF_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  CF_STATUS_INVALID_UTF8 = 2,
  /**
   * Input text did not parse; see cf_last_error_message.
   */
  CF_STATUS_PARSE_ERROR = 3,
  /**
   * Arguments were structurally valid but out of domain.
   */
  CF_STATUS_INVALID_ARGUMENT = 4,
  /**
   * The operation requires parity superselection and the input violates it.
   */
  CF_STATUS_SSR_VIOLATION = 5,
  /**
   * Unexpected internal failure.
   */
  CF_STATUS_INTERNAL_ERROR = 6,
} CfStatus;

/**
 * Opaque density-matrix handle.
 */
typedef struct CfDensity CfDensity;

/**
 * Opaque pure-state handle.
 */
typedef struct CfState CfState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Semantic version of the underlying library. Static storage; do not free.
 */
const char *cf_version(void);

/**
 * Message describing the most recent failure on this thread, or null if
 * none. Caller frees with cf_string_free.
 */
char *cf_last_error_message(void);

/**
 * Releases a string returned by this library.
 */
void cf_string_free(char *ptr);

enum CfStatus cf_state_parse(const char *text, struct CfState **out);

void cf_state_free(struct CfState *ptr);

enum CfStatus cf_state_to_string(const struct CfState *state, char **out);

enum CfStatus cf_state_norm(const struct CfState *state, double *out);

enum CfStatus cf_state_parity(const struct CfState *state, enum CfParity *out);

enum CfStatus cf_state_ssr_valid(const struct CfState *state, bool *out);

/**
 * Rewrites the state in the mode order given as a label list ("acb" or
 * "a,c,b"), applying the fermionic reordering signs.
 */
enum CfStatus cf_state_reorder(const struct CfState *state,
                               const char *order,
                               struct CfState **out);

/**
 * Projects onto the state and traces out the labeled modes.
 */
enum CfStatus cf_state_reduce(const struct CfState *state,
                              const char *trace_out,
                              struct CfDensity **out);

enum CfStatus cf_density_parse(const char *text, struct CfDensity **out);

void cf_density_free(struct CfDensity *ptr);

enum CfStatus cf_density_to_string(const struct CfDensity *rho, char **out);

enum CfStatus cf_density_dim(const struct CfDensity *rho, uintptr_t *out);

enum CfStatus cf_density_ssr_valid(const struct CfDensity *rho, bool *out);

/**
 * Negativity across the cut separating the last mode from the rest.
 */
enum CfStatus cf_density_negativity(const struct CfDensity *rho, double *out);

enum CfStatus cf_density_eof_wootters(const struct CfDensity *rho, double *out);

/**
 * Entanglement of formation by convex-roof minimization. With
 * `ssr_constrained` true the decomposition members must have definite
 * parity and the input must pass the superselection check. `converged`
 * reports whether the optimizer met its stall tolerance; on false the
 * value is an upper bound.
 */
enum CfStatus cf_density_eof_roof(const struct CfDensity *rho,
                                  bool ssr_constrained,
                                  uint64_t seed,
                                  uint32_t restarts,
                                  double *out_value,
                                  bool *out_converged);

enum CfStatus cf_erasure_quantum_capacity(double p, double *out);

/**
 * Negativity of the erasure channel's Choi state.
 */
enum CfStatus cf_erasure_negativity(double p, double *out);

/**
 * Writes the six eigenvalues of the partially transposed Choi state into
 * `out`, descending. `out` must point to at least 6 doubles.
 */
enum CfStatus cf_erasure_ppt_spectrum(double p, double *out);

/**
 * Two-mode output state of the accelerated observer, r in [0, pi/4].
 */
enum CfStatus cf_grassmann_state(double r, struct CfDensity **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CARFOCK_H */
