#ifndef K2LOCAL_H
#define K2LOCAL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum K2Status {
  K2_STATUS_OK = 0,
  K2_STATUS_NULL_POINTER = 1,
  K2_STATUS_INVALID_ARGUMENT = 2,
  K2_STATUS_NOT_A_UNIT = 3,
  K2_STATUS_PRECISION_MISMATCH = 4,
  K2_STATUS_INVARIANT = 5,
  K2_STATUS_CONFIG = 6,
  K2_STATUS_INTERNAL = 7,
} K2Status;

/**
 * An element of the extended stabilizer group `G_2`, truncated at `3^N`.
 */
typedef struct K2G2Element K2G2Element;

/**
 * An element of `W(F_9)/3^N`.
 */
typedef struct K2Witt K2Witt;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null.  Valid until the
 * next failing call on the same thread.
 */
const char *k2_last_error_message(void);

/**
 * Library version, a static string.
 */
const char *k2_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void k2_string_free(char *s);

/**
 * `c0 + c1 x` at precision `n`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum K2Status k2_witt_new(int64_t c0, int64_t c1, uint32_t n, struct K2Witt **out);

/**
 * The Teichmuller lift omega; `omega_root` is 0 (primary) or 1 (conjugate).
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum K2Status k2_witt_omega(uint32_t n, uint32_t omega_root, struct K2Witt **out);

/**
 * # Safety
 * `w` must be null or a handle from this library, not yet freed.
 */
void k2_witt_free(struct K2Witt *w);

/**
 * Coordinates in `[0, 3^N)`.
 *
 * # Safety
 * `w` must be a live handle; `c0`, `c1` valid for writes.
 */
enum K2Status k2_witt_coords(const struct K2Witt *w, uint64_t *c0, uint64_t *c1);

/**
 * # Safety
 * `a`, `b` must be live handles; `out` valid for writes.
 */
enum K2Status k2_witt_mul(const struct K2Witt *a, const struct K2Witt *b, struct K2Witt **out);

/**
 * # Safety
 * `a` must be a live handle; `out` valid for writes.
 */
enum K2Status k2_witt_inverse(const struct K2Witt *a, struct K2Witt **out);

/**
 * The norm to `Z/3^N`, in `[0, 3^N)`.
 *
 * # Safety
 * `a` must be a live handle; `out` valid for writes.
 */
enum K2Status k2_witt_norm(const struct K2Witt *a, uint64_t *out);

/**
 * `(x0 + x1 w) + (y0 + y1 w) S`, composed with Frobenius when `galois` is set.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum K2Status k2_g2_new(int64_t x0,
                        int64_t x1,
                        int64_t y0,
                        int64_t y1,
                        bool galois,
                        uint32_t n,
                        struct K2G2Element **out);

/**
 * The order-3 element `a = -(1 + omega S)/2`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum K2Status k2_g2_element_a(uint32_t n, uint32_t omega_root, struct K2G2Element **out);

/**
 * The Frobenius generator `phi`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum K2Status k2_g2_phi(uint32_t n, struct K2G2Element **out);

/**
 * # Safety
 * `g` must be null or a handle from this library, not yet freed.
 */
void k2_g2_free(struct K2G2Element *g);

/**
 * # Safety
 * `a`, `b` must be live handles; `out` valid for writes.
 */
enum K2Status k2_g2_mul(const struct K2G2Element *a,
                        const struct K2G2Element *b,
                        struct K2G2Element **out);

/**
 * # Safety
 * `a` must be a live handle; `out` valid for writes.
 */
enum K2Status k2_g2_inverse(const struct K2G2Element *a, struct K2G2Element **out);

/**
 * Order of `g` if at most `max`, else 0.
 *
 * # Safety
 * `g` must be a live handle; `out` valid for writes.
 */
enum K2Status k2_g2_order(const struct K2G2Element *g, uint32_t max, uint32_t *out);

/**
 * Reduced determinant, a residue modulo `3^{N-1}` in `[0, 3^{N-1})`.
 *
 * # Safety
 * `g` must be a live handle; `out` valid for writes.
 */
enum K2Status k2_g2_reduced_det(const struct K2G2Element *g, uint64_t *out);

/**
 * `log(u)/log(4)` modulo `3^{N-1}` for `u = 1 mod 3`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum K2Status k2_log_base4(int64_t u, uint32_t n, uint64_t *out);

/**
 * `v_3(4^{|t|/2} - 1)` for a nonzero multiple of 4.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum K2Status k2_central_character_valuation(int64_t t, uint32_t *out);

/**
 * `d_1` of one adapted generator.  Families: 0 delta, 1 b, 2 bbar, 3 deltabar;
 * `label` is `k` for delta and `2k+1` for b, bbar.  The image is
 * `coeff * v1^shift * (target_family, target_label)`; `coeff = 0` means zero.
 *
 * # Safety
 * All out-pointers must be valid for writes.
 */
enum K2Status k2_d1_eval(uint32_t family_code_in,
                         int64_t label,
                         int8_t *coeff,
                         uint32_t *shift,
                         uint32_t *target_family,
                         int64_t *target_label);

/**
 * `dim E_2^{p,0,t}` for `p = 0..3` at caps `(j, v)`, checked against doubled caps.
 *
 * # Safety
 * `dims` must point to 4 writable `size_t`; `stabilized` valid for writes.
 */
enum K2Status k2_e2_p0(int64_t t, uint32_t j, uint32_t v, size_t *dims, bool *stabilized);

/**
 * Run every gate on a `key=value` config (null or empty for defaults).  The
 * consolidated report is written to `json_out` as a new string; nothing is
 * written to disk.
 *
 * # Safety
 * `config_text` must be null or NUL-terminated; out-pointers valid for writes.
 */
enum K2Status k2_verify_all_json(const char *config_text, char **json_out, bool *pass);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* K2LOCAL_H */
