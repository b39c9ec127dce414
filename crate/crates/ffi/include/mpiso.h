/* C interface for the multiplicative-partial-isometry toolkit.
 * Generated — do not edit by hand. */

#ifndef MPISO_H
#define MPISO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum MpisoStatus {
  MpisoStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  MpisoStatus_NullArgument = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  MpisoStatus_InvalidUtf8 = 2,
  /**
   * Matrix dimensions are inconsistent or unsupported.
   */
  MpisoStatus_Dimension = 3,
  /**
   * A tolerance was outside `(0, 1)`.
   */
  MpisoStatus_Tolerance = 4,
  /**
   * A matrix expected to be positive semidefinite is not.
   */
  MpisoStatus_NotPsd = 5,
  /**
   * An iterative numerical routine failed to converge.
   */
  MpisoStatus_Numeric = 6,
  /**
   * A span is not closed under the algebra operations.
   */
  MpisoStatus_NotAlgebra = 7,
  /**
   * A leg has no two-sided unit where one is required.
   */
  MpisoStatus_NotUnital = 8,
  /**
   * Antipode requested outside the star-closed scope.
   */
  MpisoStatus_NoAntipode = 9,
  /**
   * An operator does not belong to the expected leg.
   */
  MpisoStatus_NotLegElement = 10,
  /**
   * An algebra presentation fails its construction hypotheses.
   */
  MpisoStatus_Presentation = 11,
  /**
   * A representation is not a faithful unital *-homomorphism.
   */
  MpisoStatus_Representation = 12,
  /**
   * Quasibasis construction failed (functional not faithful/positive).
   */
  MpisoStatus_Quasibasis = 13,
  /**
   * A map is not a valid action of the algebra.
   */
  MpisoStatus_Action = 14,
  /**
   * Supports or projected subspaces do not match.
   */
  MpisoStatus_Support = 15,
  /**
   * A structural prerequisite (e.g. a classification level) is not met.
   */
  MpisoStatus_Prerequisite = 16,
  /**
   * Malformed input document or parameter.
   */
  MpisoStatus_Format = 17,
  /**
   * Filesystem error.
   */
  MpisoStatus_Io = 18,
  /**
   * JSON error.
   */
  MpisoStatus_Json = 19,
  /**
   * An internal invariant failed.
   */
  MpisoStatus_Internal = 20,
} MpisoStatus;

/**
 * An operator on `H⊗H` under test, with its tolerance. Opaque.
 */
typedef struct MpisoCandidate MpisoCandidate;

/**
 * A finished classification. Opaque.
 */
typedef struct MpisoClassification MpisoClassification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Detail message for the most recent failure on this thread.
 *
 * The pointer stays valid until the next failing call on the same thread.
 * Never free it.
 *
 * # Safety
 * The returned pointer must not be written through or freed.
 */
const char *mpiso_last_error_message(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be a pointer previously returned by a function documented to
 * transfer string ownership, or null. Passing any other pointer, or the
 * same pointer twice, is undefined behavior.
 */
void mpiso_string_free(char *s);

/**
 * Creates a candidate from an operator on `H⊗H`.
 *
 * `data` holds `2·side²·side²` interleaved doubles (the operator is
 * `side²×side²`, row-major), where `side` is the dimension of `H`.
 * `tol` is the relative tolerance for equality and rank decisions.
 * On success, `*out` owns the candidate; release with
 * [`mpiso_candidate_free`].
 *
 * # Safety
 * `data` must point to at least `2·side⁴` readable doubles and `out` to a
 * writable pointer slot.
 */
enum MpisoStatus mpiso_candidate_new(const double *data,
                                     uintptr_t side,
                                     double tol,
                                     struct MpisoCandidate **out);

/**
 * Builds one of the reference examples.
 *
 * `kind` is `"nonunital"` (ignore `n`), `"cyclic"` (cyclic group algebra
 * of order `n`), or `"pair-groupoid"` (full matrix algebra `M_n`).
 *
 * # Safety
 * `kind` must be a NUL-terminated string and `out` a writable slot.
 */
enum MpisoStatus mpiso_generate(const char *kind,
                                uintptr_t n,
                                double tol,
                                struct MpisoCandidate **out);

/**
 * Releases a candidate.
 *
 * # Safety
 * `c` must come from a constructor of this library and not have been freed
 * before; null is ignored.
 */
void mpiso_candidate_free(struct MpisoCandidate *c);

/**
 * Writes the dimension of `H` to `*side`.
 *
 * # Safety
 * `c` must be a live candidate handle; `side` must be writable.
 */
enum MpisoStatus mpiso_candidate_dim(const struct MpisoCandidate *c, uintptr_t *side);

/**
 * Copies the operator out as interleaved row-major doubles
 * (`2·side⁴` values; query `side` with [`mpiso_candidate_dim`]).
 *
 * # Safety
 * `c` must be a live candidate handle; `data` must point to at least
 * `2·side⁴` writable doubles.
 */
enum MpisoStatus mpiso_candidate_data(const struct MpisoCandidate *c, double *data);

/**
 * Checks the five defining equations.
 *
 * Writes whether all equations pass to `*is_mpi` and the worst residual to
 * `*max_residual`.
 *
 * # Safety
 * `c` must be a live candidate handle; `is_mpi` and `max_residual` must be
 * writable.
 */
enum MpisoStatus mpiso_check_mpi(const struct MpisoCandidate *c,
                                 bool *is_mpi,
                                 double *max_residual);

/**
 * Runs the full classification.
 *
 * On success, `*out` owns the classification; release it with
 * [`mpiso_classification_free`].
 *
 * # Safety
 * `c` must be a live candidate handle and `out` a writable slot.
 */
enum MpisoStatus mpiso_classify(const struct MpisoCandidate *c, struct MpisoClassification **out);

/**
 * Releases a classification.
 *
 * # Safety
 * `r` must come from [`mpiso_classify`] and not have been freed before;
 * null is ignored.
 */
void mpiso_classification_free(struct MpisoClassification *r);

/**
 * Returns the verdict string (e.g. `"C*-Hopf (multiplicative unitary)"`).
 *
 * The caller owns the returned string; release it with
 * [`mpiso_string_free`].
 *
 * # Safety
 * `r` must be a live classification handle.
 */
char *mpiso_classification_verdict(const struct MpisoClassification *r);

/**
 * Returns the full classification as canonical JSON.
 *
 * The caller owns the returned string; release it with
 * [`mpiso_string_free`].
 *
 * # Safety
 * `r` must be a live classification handle.
 */
char *mpiso_classification_json(const struct MpisoClassification *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MPISO_H */
