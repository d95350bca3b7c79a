/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef DAIL_H
#define DAIL_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum DailStatus {
  DAIL_STATUS_OK = 0,
  DAIL_STATUS_NULL_POINTER = 1,
  DAIL_STATUS_INVALID_ARGUMENT = 2,
  DAIL_STATUS_NOT_PRIME = 3,
  DAIL_STATUS_OUT_OF_RANGE = 4,
  DAIL_STATUS_BUFFER_TOO_SMALL = 5,
  DAIL_STATUS_MODEL_INCONSISTENCY = 6,
  DAIL_STATUS_SIMULATION = 7,
  DAIL_STATUS_INTERNAL = 8,
} DailStatus;

/**
 * Reading of the success-probability formula.
 */
typedef enum DailInterpretation {
  DAIL_INTERPRETATION_LITERAL = 0,
  DAIL_INTERPRETATION_STANDALONE = 1,
  DAIL_INTERPRETATION_NORMALIZED = 2,
} DailInterpretation;

typedef enum DailScheme {
  DAIL_SCHEME_LATIN = 0,
  DAIL_SCHEME_STATIC_CHANNEL = 1,
} DailScheme;

/**
 * Opaque orthogonal family.
 */
typedef struct DailFamily DailFamily;

/**
 * Opaque Latin rectangle.
 */
typedef struct DailRectangle DailRectangle;

typedef struct DailHop {
  uint32_t channel;
  uint32_t slot;
} DailHop;

/**
 * Simulation parameters. `abstract_neighbors < 0` selects the default disk
 * geometry; otherwise every sensor gets exactly that many cross-network
 * neighbours.
 */
typedef struct DailSimConfig {
  uint32_t n_wbans;
  uint32_t sensors_per_wban;
  uint32_t channels;
  uint32_t frame_length;
  double omega;
  uint32_t superframes;
  uint64_t seed;
  enum DailScheme scheme;
  bool coordinated;
  int32_t abstract_neighbors;
  uint32_t retry_limit;
} DailSimConfig;

typedef struct DailSimResult {
  double mcp;
  double pc;
  uint64_t total_tx;
  uint64_t collided_tx;
} DailSimResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length excluding the NUL,
 * or 0 when there is no message.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t dail_last_error_message(char *buf, size_t len);

/**
 * Complete family of `q − 1` squares for prime `q`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum DailStatus dail_family_generate(size_t q, struct DailFamily **out);

/**
 * # Safety
 * `family` must be null or a handle from [`dail_family_generate`] not yet freed.
 */
void dail_family_free(struct DailFamily *family);

/**
 * Number of squares and their order.
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum DailStatus dail_family_info(const struct DailFamily *family, size_t *len, size_t *order);

/**
 * # Safety
 * Pointers must be null or valid.
 */
enum DailStatus dail_family_are_orthogonal(const struct DailFamily *family,
                                           size_t a,
                                           size_t b,
                                           bool *out);

/**
 * Cuts square `index` to `channels x slots`.
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum DailStatus dail_family_cut(const struct DailFamily *family,
                                size_t index,
                                size_t channels,
                                size_t slots,
                                struct DailRectangle **out);

/**
 * # Safety
 * `rect` must be null or a live handle.
 */
void dail_rectangle_free(struct DailRectangle *rect);

/**
 * # Safety
 * Pointers must be null or valid.
 */
enum DailStatus dail_rectangle_shape(const struct DailRectangle *rect,
                                     size_t *channels,
                                     size_t *slots);

/**
 * # Safety
 * Pointers must be null or valid.
 */
enum DailStatus dail_rectangle_get(const struct DailRectangle *rect,
                                   size_t channel,
                                   size_t slot,
                                   uint32_t *out);

/**
 * Writes the hops of `symbol` into `hops`. `len` always receives the hop
 * count; if it exceeds `capacity` nothing is written and
 * [`DailStatus::BufferTooSmall`] is returned.
 *
 * # Safety
 * `hops` must be valid for `capacity` elements (or null with capacity 0).
 */
enum DailStatus dail_rectangle_pattern(const struct DailRectangle *rect,
                                       uint32_t symbol,
                                       struct DailHop *hops,
                                       size_t capacity,
                                       size_t *len);

/**
 * Cells shared by symbol `sa` of `a` and symbol `sb` of `b`.
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum DailStatus dail_pattern_overlap(const struct DailRectangle *a,
                                     uint32_t sa,
                                     const struct DailRectangle *b,
                                     uint32_t sb,
                                     size_t *out);

/**
 * Per-packet success probability for `q` neighbours, `m` channels, `k`
 * slots, use factor `omega` and `family_size` rectangles.
 *
 * # Safety
 * `out` must be null or valid.
 */
enum DailStatus dail_success_probability(uint32_t q,
                                         uint32_t m,
                                         uint32_t k,
                                         double omega,
                                         uint32_t family_size,
                                         enum DailInterpretation interpretation,
                                         double *out);

/**
 * `(max(q − k + 1, 0), q)`.
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum DailStatus dail_collision_bounds(uint32_t q, uint32_t k, uint32_t *lower, uint32_t *upper);

/**
 * Builds a network, schedules it and runs it.
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum DailStatus dail_simulate(const struct DailSimConfig *config, struct DailSimResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DAIL_H */
