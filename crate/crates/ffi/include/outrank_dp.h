#ifndef OUTRANK_DP_H
#define OUTRANK_DP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OdpMechanism {
  ODP_MECHANISM_NONE = 0,
  ODP_MECHANISM_DP = 1,
  ODP_MECHANISM_IDP = 2,
} OdpMechanism;

typedef enum OdpMethod {
  ODP_METHOD_ELECTRE3 = 0,
  ODP_METHOD_PROMETHEE2 = 1,
} OdpMethod;

/**
 * Status codes. The first four match the CLI exit codes.
 */
typedef enum OdpStatus {
  ODP_STATUS_OK = 0,
  ODP_STATUS_CONFIG_ERROR = 2,
  ODP_STATUS_DATA_ERROR = 3,
  ODP_STATUS_PRIVACY_ERROR = 4,
  ODP_STATUS_NULL_POINTER = 10,
  ODP_STATUS_INVALID_UTF8 = 11,
  ODP_STATUS_BUFFER_TOO_SMALL = 12,
  ODP_STATUS_PANIC = 13,
} OdpStatus;

/**
 * Parsed and validated problem configuration.
 */
typedef struct OdpConfig OdpConfig;

/**
 * Per-user evaluations grouped by alternative.
 */
typedef struct OdpEvaluations OdpEvaluations;

/**
 * Alternatives x criteria performance matrix.
 */
typedef struct OdpMatrix OdpMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next library call on the same thread.
 */
const char *odp_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library.
 */
void odp_string_free(char *s);

/**
 * Parses and validates a JSON configuration.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum OdpStatus odp_config_from_json(const char *json, struct OdpConfig **out);

/**
 * Loads a bundled configuration: `"synthetic"` or `"beer"`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum OdpStatus odp_config_bundled(const char *name, struct OdpConfig **out);

/**
 * # Safety
 * `config` must be NULL or a handle from this library, not yet freed.
 */
void odp_config_free(struct OdpConfig *config);

/**
 * Parses an evaluations CSV (`alternative_id,user_id,<criteria...>`).
 *
 * # Safety
 * Pointers must be valid; `csv` must be NUL-terminated.
 */
enum OdpStatus odp_evaluations_from_csv(const struct OdpConfig *config,
                                        const char *csv,
                                        struct OdpEvaluations **out);

/**
 * # Safety
 * `evals` must be NULL or a handle from this library, not yet freed.
 */
void odp_evaluations_free(struct OdpEvaluations *evals);

/**
 * Parses a matrix CSV (`alternative_id,<criteria...>`).
 *
 * # Safety
 * Pointers must be valid; `csv` must be NUL-terminated.
 */
enum OdpStatus odp_matrix_from_csv(const struct OdpConfig *config,
                                   const char *csv,
                                   struct OdpMatrix **out);

/**
 * Averages the evaluations into the performance matrix OM.
 *
 * # Safety
 * Pointers must be valid handles; `out` must be writable.
 */
enum OdpStatus odp_aggregate(const struct OdpConfig *config,
                             const struct OdpEvaluations *evals,
                             struct OdpMatrix **out);

/**
 * Adds Laplace noise to `om` with budget `epsilon` per alternative. Output is
 * clamped to the criterion domains unless the config disables clamping.
 *
 * # Safety
 * Pointers must be valid handles; `out` must be writable.
 */
enum OdpStatus odp_anonymize(const struct OdpConfig *config,
                             const struct OdpMatrix *om,
                             const struct OdpEvaluations *evals,
                             enum OdpMechanism mechanism,
                             double epsilon,
                             uint64_t seed,
                             struct OdpMatrix **out);

/**
 * Writes the row and column counts.
 *
 * # Safety
 * `matrix` must be a valid handle; `rows` and `cols` must be writable.
 */
enum OdpStatus odp_matrix_shape(const struct OdpMatrix *matrix, size_t *rows, size_t *cols);

/**
 * Copies the row-major values into `buf`, which must hold rows * cols doubles.
 *
 * # Safety
 * `buf` must point to at least `len` writable doubles.
 */
enum OdpStatus odp_matrix_values(const struct OdpMatrix *matrix, double *buf, size_t len);

/**
 * Serializes the matrix as CSV; free the result with `odp_string_free`.
 *
 * # Safety
 * `matrix` must be a valid handle; `out` must be writable.
 */
enum OdpStatus odp_matrix_to_csv(const struct OdpMatrix *matrix, char **out);

/**
 * # Safety
 * `matrix` must be NULL or a handle from this library, not yet freed.
 */
void odp_matrix_free(struct OdpMatrix *matrix);

/**
 * Ranks the matrix and writes one rank score per alternative (row order)
 * into `scores`; 1 is best and tied alternatives share the mean position.
 *
 * # Safety
 * `scores` must point to at least `len` writable doubles.
 */
enum OdpStatus odp_rank(const struct OdpConfig *config,
                        const struct OdpMatrix *matrix,
                        enum OdpMethod method,
                        double *scores,
                        size_t len);

/**
 * Mean absolute cellwise difference of two same-shaped matrices.
 *
 * # Safety
 * Handles must be valid; `out` must be writable.
 */
enum OdpStatus odp_mae(const struct OdpMatrix *a, const struct OdpMatrix *b, double *out);

/**
 * Tie-aware Spearman correlation of two score vectors of length `n`.
 * A constant input yields 0 and sets `*degenerate` to 1.
 *
 * # Safety
 * `x` and `y` must point to `n` doubles; `out` and `degenerate` must be
 * writable (`degenerate` may be NULL).
 */
enum OdpStatus odp_spearman(const double *x,
                            const double *y,
                            size_t n,
                            double *out,
                            int32_t *degenerate);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OUTRANK_DP_H */
