#ifndef ACFRONT_H
#define ACFRONT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Front orientation: `Up` connects -1 to +1.
 */
typedef enum AcfOrientation {
  ACF_ORIENTATION_UP = 0,
  ACF_ORIENTATION_DOWN = 1,
} AcfOrientation;

/**
 * How a PDE run ended.
 */
typedef enum AcfPdeOutcome {
  ACF_PDE_OUTCOME_COMPLETED = 0,
  ACF_PDE_OUTCOME_PINNED = 1,
  ACF_PDE_OUTCOME_ALL_FRONTS_ANNIHILATED = 2,
} AcfPdeOutcome;

/**
 * Result codes of the C interface.
 */
typedef enum AcfStatus {
  ACF_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  ACF_STATUS_NULL_POINTER = 1,
  /**
   * Arguments were rejected (bad spec string, non-monotone positions, eps out of range...).
   */
  ACF_STATUS_INVALID_INPUT = 2,
  /**
   * A numerical method failed (non-convergence, NaN, step-size underflow...).
   */
  ACF_STATUS_NUMERIC_FAILURE = 3,
  ACF_STATUS_UNKNOWN_SCENARIO = 4,
  /**
   * The output buffer is shorter than the result; the required length is still reported.
   */
  ACF_STATUS_BUFFER_TOO_SMALL = 5,
  ACF_STATUS_IO = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  ACF_STATUS_PANIC = 7,
} AcfStatus;

/**
 * Opaque forcing description.
 */
typedef struct AcfForcing AcfForcing;

/**
 * Opaque Melnikov function evaluator.
 */
typedef struct AcfMelnikov AcfMelnikov;

/**
 * Opaque PDE run configuration.
 */
typedef struct AcfPdeConfig AcfPdeConfig;

/**
 * Opaque PDE run result.
 */
typedef struct AcfPdeResult AcfPdeResult;

/**
 * Message of the last failure on this thread, or null. The pointer stays valid until the next
 * failing call on the same thread.
 */
const char *acf_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *acf_version(void);

/**
 * Parses a forcing spec (`zero`, `topo:exp:1`, `triple:1,0,0,2`, `canonical:cos:1:2;const:0;const:0`).
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AcfStatus acf_forcing_parse(const char *spec,
                                 struct AcfForcing **out);

/**
 * Topographic forcing from a topography spec (`exp:MU`, `-alg:P`, `sin:AMP:K`, ...).
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AcfStatus acf_forcing_topography(const char *spec, struct AcfForcing **out);

/**
 * # Safety
 * `f` must be null or a handle from `acf_forcing_*` not yet freed.
 */
void acf_forcing_free(struct AcfForcing *f);

/**
 * Melnikov evaluator for `forcing` and front orientation `o` (closed form when available).
 *
 * # Safety
 * `forcing` must be a live handle and `out` a valid pointer.
 */
enum AcfStatus acf_melnikov_new(const struct AcfForcing *forcing,
                                enum AcfOrientation o,
                                struct AcfMelnikov **out);

/**
 * `R(phi)` and `R'(phi)`.
 *
 * # Safety
 * `m` must be a live handle; `r` and `r_prime` valid pointers.
 */
enum AcfStatus acf_melnikov_eval(const struct AcfMelnikov *m,
                                 double phi,
                                 double *r,
                                 double *r_prime);

/**
 * # Safety
 * `m` must be null or a live handle.
 */
void acf_melnikov_free(struct AcfMelnikov *m);

/**
 * Right-hand side of the reduced N-front ODE at `positions[0..n]` (strictly increasing),
 * written to `velocities[0..n]`.
 *
 * # Safety
 * `forcing` must be a live handle; `positions` and `velocities` must hold `n` values.
 */
enum AcfStatus acf_nfront_rhs(const struct AcfForcing *forcing,
                              double eps,
                              enum AcfOrientation first,
                              const double *positions,
                              uintptr_t n,
                              double *velocities);

/**
 * Integrates the reduced N-front ODE to `t_end` and writes the final positions over `positions`.
 *
 * # Safety
 * `forcing` must be a live handle; `positions` must hold `n` values.
 */
enum AcfStatus acf_nfront_integrate(const struct AcfForcing *forcing,
                                    double eps,
                                    enum AcfOrientation first,
                                    double *positions,
                                    uintptr_t n,
                                    double t_end);

/**
 * Number of localized stationary patterns of `n` fronts on topography `topo_spec` and whether
 * every pattern with two or more fronts is unstable.
 *
 * # Safety
 * `topo_spec` must be a NUL-terminated string; `count` and `all_unstable` valid pointers.
 */
enum AcfStatus acf_stationary_localized(const char *topo_spec,
                                        double eps,
                                        uintptr_t n,
                                        uintptr_t *count,
                                        bool *all_unstable);

/**
 * Number of intersections of the first-order stable and unstable manifolds of the `-1` state
 * on the section `x = 0` (front positions in `[-4.5, 4.5]`).
 *
 * # Safety
 * `forcing` must be a live handle and `count` a valid pointer.
 */
enum AcfStatus acf_homoclinic_count(const struct AcfForcing *forcing, double eps, uintptr_t *count);

/**
 * Evans function of the homogeneous front at `lambda = re + i im`.
 *
 * # Safety
 * `out_re` and `out_im` must be valid pointers.
 */
enum AcfStatus acf_evans_homogeneous(double re, double im, double *out_re, double *out_im);

/**
 * Configuration of a built-in scenario.
 *
 * # Safety
 * `id` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AcfStatus acf_pde_config_scenario(const char *id, struct AcfPdeConfig **out);

/**
 * Configuration from its JSON serialization (as stored in a run's meta.json).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AcfStatus acf_pde_config_from_json(const char *json, struct AcfPdeConfig **out);

/**
 * Applies a `key=value` override (dotted keys for nested fields).
 *
 * # Safety
 * `cfg` must be a live handle and `assignment` a NUL-terminated string.
 */
enum AcfStatus acf_pde_config_set(struct AcfPdeConfig *cfg, const char *assignment);

/**
 * # Safety
 * `cfg` must be null or a live handle.
 */
void acf_pde_config_free(struct AcfPdeConfig *cfg);

/**
 * Runs the PDE.
 *
 * # Safety
 * `cfg` must be a live handle and `out` a valid pointer.
 */
enum AcfStatus acf_pde_run(const struct AcfPdeConfig *cfg, struct AcfPdeResult **out);

/**
 * Outcome and final time of a run.
 *
 * # Safety
 * `r` must be a live handle; `outcome` and `final_time` valid pointers.
 */
enum AcfStatus acf_pde_result_summary(const struct AcfPdeResult *r,
                                      enum AcfPdeOutcome *outcome,
                                      double *final_time);

/**
 * Front positions of the last tracking sample. `len` receives the number of fronts; when it
 * exceeds `cap` the status is `BufferTooSmall` and nothing is copied.
 *
 * # Safety
 * `r` must be a live handle; `buf` must hold `cap` values; `len` a valid pointer.
 */
enum AcfStatus acf_pde_result_positions(const struct AcfPdeResult *r,
                                        double *buf,
                                        uintptr_t cap,
                                        uintptr_t *len);

/**
 * Final field values on the grid nodes, with the same buffer protocol as
 * [`acf_pde_result_positions`].
 *
 * # Safety
 * `r` must be a live handle; `buf` must hold `cap` values; `len` a valid pointer.
 */
enum AcfStatus acf_pde_result_field(const struct AcfPdeResult *r,
                                    double *buf,
                                    uintptr_t cap,
                                    uintptr_t *len);

/**
 * # Safety
 * `r` must be null or a live handle.
 */
void acf_pde_result_free(struct AcfPdeResult *r);

#endif  /* ACFRONT_H */
