#ifndef ANOSOV_H
#define ANOSOV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AnosovConclusion {
  ANOSOV_CONCLUSION_NO_ANOSOV = 0,
  ANOSOV_CONCLUSION_NO_TRANSITIVE_ANOSOV = 1,
  ANOSOV_CONCLUSION_PARITY_CONSTRAINT = 2,
  ANOSOV_CONCLUSION_INCONCLUSIVE = 3,
} AnosovConclusion;

typedef enum AnosovConvention {
  // `Σ (-1)^d Tr(M_d^{-l})`, the default.
  ANOSOV_CONVENTION_INVERSE = 0,
  // `Σ (-1)^d Tr(M_d^l)`.
  ANOSOV_CONVENTION_FORWARD = 1,
} AnosovConvention;

typedef enum AnosovStatus {
  ANOSOV_STATUS_OK = 0,
  ANOSOV_STATUS_NULL_POINTER = 1,
  ANOSOV_STATUS_INVALID_UTF8 = 2,
  // Malformed JSON or input outside the supported hypotheses.
  ANOSOV_STATUS_INVALID_INPUT = 3,
  // An internal cross-check disagreed.
  ANOSOV_STATUS_CHECK_FAILED = 4,
  ANOSOV_STATUS_PANIC = 5,
} AnosovStatus;

// Ring automorphism as per-degree matrices.
typedef struct AnosovAutomorphism AnosovAutomorphism;

// Result of running the obstruction rules on a manifold.
typedef struct AnosovReport AnosovReport;

// Cohomology ring with its graded bases.
typedef struct AnosovRing AnosovRing;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until
// the next call into the library from the same thread.
const char *anosov_last_error(void);

// # Safety
// `s` is null or was returned by this library and not yet freed.
void anosov_string_free(char *s);

// Parses a ring description, a sphere product `{"factors": ...}` or a
// manifold spec with a `"kind"`.
//
// # Safety
// `json` is a NUL-terminated string; `out` is a valid pointer.
enum AnosovStatus anosov_ring_from_json(const char *json, struct AnosovRing **out);

// # Safety
// `ring` is null or a handle from [`anosov_ring_from_json`] not yet freed.
void anosov_ring_free(struct AnosovRing *ring);

// Top degree, or 0 for a null handle.
//
// # Safety
// `ring` is null or a live handle.
uint32_t anosov_ring_top_degree(const struct AnosovRing *ring);

// # Safety
// `ring` is a live handle; `out` is a valid pointer.
enum AnosovStatus anosov_ring_betti(const struct AnosovRing *ring, uint32_t degree, uintptr_t *out);

// Builds an automorphism from `{"images": ...}` or `{"degree_matrices": ...}`
// and checks that it preserves cup products.
//
// # Safety
// `ring` is a live handle, `json` a NUL-terminated string, `out` valid.
enum AnosovStatus anosov_automorphism_from_json(const struct AnosovRing *ring,
                                                const char *json,
                                                struct AnosovAutomorphism **out);

// # Safety
// `aut` is null or a live handle.
void anosov_automorphism_free(struct AnosovAutomorphism *aut);

// Lefschetz numbers `Λ(f^l)`, `l = 1..len`, as JSON.
//
// # Safety
// `aut` is a live handle; `out` is a valid pointer.
enum AnosovStatus anosov_lefschetz_json(const struct AnosovAutomorphism *aut,
                                        uint64_t len,
                                        enum AnosovConvention convention,
                                        char **out);

// Growth classification of `|Λ(f^l)|` against the periodic-orbit laws.
//
// # Safety
// `aut` is a live handle; `out` is a valid pointer.
enum AnosovStatus anosov_compatibility_json(const struct AnosovAutomorphism *aut, char **out);

// Runs every obstruction rule on a manifold spec.
//
// # Safety
// `spec` is a NUL-terminated string; `out` is a valid pointer.
enum AnosovStatus anosov_analyze(const char *spec, struct AnosovReport **out);

// # Safety
// `report` is null or a live handle.
void anosov_report_free(struct AnosovReport *report);

// Strongest conclusion in the report; `Inconclusive` for a null handle.
//
// # Safety
// `report` is null or a live handle.
enum AnosovConclusion anosov_report_strongest(const struct AnosovReport *report);

// Whether some verdict rests on a bounded search only.
//
// # Safety
// `report` is null or a live handle.
bool anosov_report_bounded_only(const struct AnosovReport *report);

// # Safety
// `report` is a live handle; `out` is a valid pointer.
enum AnosovStatus anosov_report_json(const struct AnosovReport *report, char **out);

// The four rank-2 forms and their special isometry groups, as text.
//
// # Safety
// `out` is a valid pointer.
enum AnosovStatus anosov_form_tables(char **out);

// Isometry analysis of a unimodular form given as a JSON matrix.
//
// # Safety
// `matrix` is a NUL-terminated string; `out` is a valid pointer.
enum AnosovStatus anosov_form_analyze_json(const char *matrix,
                                           bool chi_nonzero,
                                           int64_t bound,
                                           char **out);

// Fixed-point counts of a hyperbolic toral automorphism by three routes.
//
// # Safety
// `matrix` is a NUL-terminated string; `out` is a valid pointer.
enum AnosovStatus anosov_oracle_cross_check_json(const char *matrix, uint64_t len, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANOSOV_H */
