/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef DRAFTRANK_H
#define DRAFTRANK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DrStatus {
  DR_STATUS_OK = 0,
  DR_STATUS_NULL_POINTER = 1,
  DR_STATUS_INVALID_ARGUMENT = 2,
  DR_STATUS_SHAPE = 3,
  DR_STATUS_CATALOG = 4,
  DR_STATUS_FORMAT = 5,
  DR_STATUS_VALIDATION = 6,
  DR_STATUS_CONFIG = 7,
  DR_STATUS_VERSION = 8,
  DR_STATUS_COMPATIBILITY = 9,
  DR_STATUS_IO = 10,
  DR_STATUS_BUFFER_TOO_SMALL = 11,
  DR_STATUS_PANIC = 12,
} DrStatus;

typedef enum DrHead {
  DR_HEAD_CPR = 0,
  DR_HEAD_RANKNET = 1,
} DrHead;

/**
 * A loaded checkpoint ready for ranking.
 */
typedef struct DrModel DrModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread ("" after success).
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *dr_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dr_version(void);

/**
 * Load a checkpoint file into a new handle stored in `*out`.
 *
 * # Safety
 * `path` must be a NUL-terminated UTF-8 string and `out` a valid pointer.
 */
enum DrStatus dr_model_load(const char *path, struct DrModel **out);

/**
 * Release a handle. Null is ignored.
 *
 * # Safety
 * `model` must come from [`dr_model_load`] and not be used afterwards.
 */
void dr_model_free(struct DrModel *model);

/**
 * # Safety
 * `model` must be a live handle and `out` a valid pointer.
 */
enum DrStatus dr_model_head(const struct DrModel *model, enum DrHead *out);

/**
 * Number of cards in the model's catalog (its input dimension).
 *
 * # Safety
 * `model` must be a live handle and `out` a valid pointer.
 */
enum DrStatus dr_model_card_count(const struct DrModel *model, size_t *out);

/**
 * Embedding dimension D (1 for ranknet).
 *
 * # Safety
 * `model` must be a live handle and `out` a valid pointer.
 */
enum DrStatus dr_model_output_dim(const struct DrModel *model, size_t *out);

/**
 * Hex SHA-256 of the catalog names the model was trained on, written with a
 * trailing NUL into `buf` (65 bytes needed).
 *
 * # Safety
 * `model` must be a live handle and `buf` writable for `buf_len` bytes.
 */
enum DrStatus dr_model_catalog_sha256(const struct DrModel *model, char *buf, size_t buf_len);

/**
 * Rank `pack` given `pool`. Writes `pack_len` card ids in ranked order to
 * `out_cards` and their scores (cpr: distance, ascending; ranknet: utility,
 * descending) to `out_scores`; either output may be null.
 *
 * # Safety
 * Input arrays must hold the stated number of elements; non-null outputs
 * must be writable for `pack_len` elements.
 */
enum DrStatus dr_model_rank(const struct DrModel *model,
                            const uint32_t *pool,
                            size_t pool_len,
                            const uint32_t *pack,
                            size_t pack_len,
                            uint32_t *out_cards,
                            double *out_scores);

/**
 * Embed a pool; writes `dim` values where `dim` must equal the output dimension.
 *
 * # Safety
 * `pool` must hold `pool_len` ids and `out` be writable for `dim` values.
 */
enum DrStatus dr_model_embed_pool(const struct DrModel *model,
                                  const uint32_t *pool,
                                  size_t pool_len,
                                  double *out,
                                  size_t dim);

/**
 * Triplet loss max(d(a,p) - d(a,n) + margin, 0) on `dim`-vectors.
 *
 * # Safety
 * `a`, `p`, `n` must each hold `dim` values; `out` must be valid.
 */
enum DrStatus dr_triplet_loss(const double *a,
                              const double *p,
                              const double *n,
                              size_t dim,
                              double margin,
                              double *out);

/**
 * Pairwise logistic loss -log sigmoid(u_pos - u_neg); NaN for non-finite input.
 */
double dr_ranknet_loss(double u_pos, double u_neg);

/**
 * Kendall tau-b of two length-`len` sequences.
 *
 * # Safety
 * `x` and `y` must each hold `len` values; `out` must be valid.
 */
enum DrStatus dr_kendall_tau(const double *x, const double *y, size_t len, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DRAFTRANK_H */
