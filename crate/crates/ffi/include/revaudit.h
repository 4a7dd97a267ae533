#ifndef REVAUDIT_H
#define REVAUDIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RaStatus {
  RA_STATUS_OK = 0,
  RA_STATUS_NULL_POINTER = 1,
  RA_STATUS_INVALID_ARGUMENT = 2,
  RA_STATUS_IO = 3,
  RA_STATUS_PARSE = 4,
  RA_STATUS_VALIDATION = 5,
  RA_STATUS_UNDEFINED = 6,
  RA_STATUS_NUMERIC = 7,
  RA_STATUS_PANIC = 8,
} RaStatus;

/**
 * A loaded, validated corpus.
 */
typedef struct RaCorpus RaCorpus;

/**
 * A fitted logistic model.
 */
typedef struct RaModel RaModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *ra_last_error_message(void);

/**
 * Loads the tables in `dir` (standard file names), using `dir/corpus.cfg`
 * when present.
 *
 * # Safety
 * `dir` must be a nul-terminated string and `out` a writable pointer.
 */
enum RaStatus ra_corpus_load(const char *dir, struct RaCorpus **out);

/**
 * # Safety
 * `corpus` must come from [`ra_corpus_load`] and not be used afterwards.
 */
void ra_corpus_free(struct RaCorpus *corpus);

/**
 * # Safety
 * `corpus` must be a live handle and `out` writable.
 */
enum RaStatus ra_corpus_submission_count(const struct RaCorpus *corpus, size_t *out);

/**
 * # Safety
 * `corpus` must be a live handle and `out` writable.
 */
enum RaStatus ra_corpus_review_count(const struct RaCorpus *corpus, size_t *out);

/**
 * Fails with `RA_STATUS_UNDEFINED` on an empty corpus.
 *
 * # Safety
 * `corpus` must be a live handle and `out` writable.
 */
enum RaStatus ra_corpus_reviews_per_submission(const struct RaCorpus *corpus, double *out);

/**
 * Reads a model written by the `audit` stage.
 *
 * # Safety
 * `path` must be a nul-terminated string and `out` a writable pointer.
 */
enum RaStatus ra_model_load(const char *path, struct RaModel **out);

/**
 * # Safety
 * `model` must come from [`ra_model_load`] and not be used afterwards.
 */
void ra_model_free(struct RaModel *model);

/**
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum RaStatus ra_model_feature_count(const struct RaModel *model, size_t *out);

/**
 * Acceptance probabilities for a row-major `n_rows x n_cols` matrix of
 * already standardized features.
 *
 * # Safety
 * `x` must hold `n_rows * n_cols` values and `out` room for `n_rows`.
 */
enum RaStatus ra_model_predict(const struct RaModel *model,
                               const double *x,
                               size_t n_rows,
                               size_t n_cols,
                               double *out);

/**
 * Largest pairwise gap in positive rates (`score >= threshold`) across
 * the group ids in `groups`. `labels` are 0 or 1.
 *
 * # Safety
 * The three arrays must hold `n` elements and `out` must be writable.
 */
enum RaStatus ra_dp_gap(const double *scores,
                        const uint8_t *labels,
                        const uint32_t *groups,
                        size_t n,
                        double threshold,
                        double *out);

/**
 * True-positive-rate gap; with `both_rates` the larger of the TPR and FPR
 * gaps.
 *
 * # Safety
 * The three arrays must hold `n` elements and `out` must be writable.
 */
enum RaStatus ra_eo_gap(const double *scores,
                        const uint8_t *labels,
                        const uint32_t *groups,
                        size_t n,
                        double threshold,
                        bool both_rates,
                        double *out);

/**
 * # Safety
 * The three arrays must hold `n` elements and `out` must be writable.
 */
enum RaStatus ra_auc_gap(const double *scores,
                         const uint8_t *labels,
                         const uint32_t *groups,
                         size_t n,
                         double *out);

/**
 * # Safety
 * Both arrays must hold `n` elements and `out` must be writable.
 */
enum RaStatus ra_roc_auc(const double *scores, const uint8_t *labels, size_t n, double *out);

/**
 * Two-sample Kolmogorov-Smirnov distance.
 *
 * # Safety
 * `a` must hold `na` and `b` `nb` elements; `out` must be writable.
 */
enum RaStatus ra_cdf_max_disparity(const double *a,
                                   size_t na,
                                   const double *b,
                                   size_t nb,
                                   double *out);

/**
 * Similarity in `[0, 1]`: one minus edit distance over the longer length.
 *
 * # Safety
 * `a` and `b` must be nul-terminated UTF-8 strings; `out` must be writable.
 */
enum RaStatus ra_normalized_levenshtein(const char *a, const char *b, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REVAUDIT_H */
