#ifndef DEPHASIM_H
#define DEPHASIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

/*
 Result codes shared by every function.
 */
typedef enum DephasimStatus {
  DEPHASIM_STATUS_OK = 0,
  DEPHASIM_STATUS_NULL_POINTER = 1,
  DEPHASIM_STATUS_INVALID_UTF8 = 2,
  DEPHASIM_STATUS_INVALID_CONFIG = 3,
  DEPHASIM_STATUS_INVALID_ARGUMENT = 4,
  DEPHASIM_STATUS_RESOURCE_LIMIT = 5,
  DEPHASIM_STATUS_TRUNCATION_INSUFFICIENT = 6,
  DEPHASIM_STATUS_BUFFER_TOO_SMALL = 7,
  DEPHASIM_STATUS_PANIC = 99,
} DephasimStatus;

/*
 Opaque model handle.
 */
typedef struct DephasimModel DephasimModel;

/*
 Decoherence factor of one level pair at one time.
 */
typedef struct DephasimPoint {
  double t;
  double vacuum_part;
  /*
   Signed Laguerre product (Fock) or thermal multiplier.
   */
  double excitation_part;
  double total;
  double theta;
  double gaussian_total;
} DephasimPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version, e.g. `"0.1.0"`. The string is static.
 */
const char *dephasim_version(void);

/*
 Message of the last failed call on this thread, or NULL. Valid until the
 next call into the library from the same thread.
 */
const char *dephasim_last_error_message(void);

/*
 Parse a JSON config (NUL-terminated UTF-8) into a new model handle.

 # Safety
 `json` must be a valid C string and `out` a writable pointer.
 */
enum DephasimStatus dephasim_model_from_json(const char *json, struct DephasimModel **out);

/*
 Release a handle from [`dephasim_model_from_json`]. NULL is ignored.

 # Safety
 `model` must come from this library and not be used afterwards.
 */
void dephasim_model_free(struct DephasimModel *model);

/*
 Number of system levels.

 # Safety
 Pointers must be valid.
 */
enum DephasimStatus dephasim_model_levels(const struct DephasimModel *model, uintptr_t *out);

/*
 Decoherence factor of pair `(n, m)` at time `t` for the model's bath state.

 # Safety
 Pointers must be valid.
 */
enum DephasimStatus dephasim_decoherence_factor(const struct DephasimModel *model,
                                                uintptr_t n,
                                                uintptr_t m,
                                                double t,
                                                struct DephasimPoint *out);

/*
 Phase of `ρ_nm(t)` relative to `ρ_nm(0)`.

 # Safety
 Pointers must be valid.
 */
enum DephasimStatus dephasim_theta_phase(const struct DephasimModel *model,
                                         uintptr_t n,
                                         uintptr_t m,
                                         double t,
                                         double *out);

/*
 Thermal decoherence factor at an explicit temperature.

 # Safety
 Pointers must be valid.
 */
enum DephasimStatus dephasim_thermal_factor(const struct DephasimModel *model,
                                            uintptr_t n,
                                            uintptr_t m,
                                            double t,
                                            double temperature,
                                            double *out);

/*
 Reduced density matrix at `t`, row-major with interleaved `(re, im)`:
 `buf[2 (i N + j)] = Re ρ_ij`. `len` is the buffer length in doubles and
 must be at least `2 N²`.

 # Safety
 `buf` must point to `len` writable doubles.
 */
enum DephasimStatus dephasim_reduced_density(const struct DephasimModel *model,
                                             double t,
                                             double *buf,
                                             uintptr_t len);

/*
 Brute-force branch overlap `<χ_m(t)|χ_n(t)>` on a truncated Fock space.
 `trunc_dim = 0` picks the dimension automatically.

 # Safety
 Pointers must be valid.
 */
enum DephasimStatus dephasim_oracle_overlap(const struct DephasimModel *model,
                                            uintptr_t n,
                                            uintptr_t m,
                                            double t,
                                            uintptr_t trunc_dim,
                                            double *out_re,
                                            double *out_im);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEPHASIM_H */
