#ifndef SPECTRAL_NSR_H
#define SPECTRAL_NSR_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum SnsrStatus {
  SNSR_STATUS_OK = 0,
  SNSR_STATUS_NULL_POINTER = 1,
  // Input rejected by validation.
  SNSR_STATUS_INVALID_INPUT = 2,
  // Numerical failure (non-convergence, non-finite values).
  SNSR_STATUS_NUMERICAL = 3,
  SNSR_STATUS_IO = 4,
  // Output buffer too small; the required size was written back.
  SNSR_STATUS_BUFFER_TOO_SMALL = 5,
  SNSR_STATUS_PANIC = 6,
} SnsrStatus;

// Which Laplacian to filter with.
typedef enum SnsrLaplacian {
  SNSR_LAPLACIAN_COMBINATORIAL = 0,
  SNSR_LAPLACIAN_NORMALIZED = 1,
} SnsrLaplacian;

typedef struct SnsrFilter SnsrFilter;

typedef struct SnsrGraph SnsrGraph;

typedef struct SnsrKb SnsrKb;

typedef struct SnsrPipeline SnsrPipeline;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the calling thread's last error message into `buf` (NUL
// terminated, truncated to `len`). Returns the full message length, 0 if
// there is none.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t snsr_last_error(char *buf, size_t len);

// Library version as a static NUL-terminated string.
const char *snsr_version(void);

// Graph on `n` anonymous nodes from parallel edge arrays.
//
// # Safety
// `src`, `dst` and `weight` must each point to `m` readable elements.
enum SnsrStatus snsr_graph_new(size_t n,
                               const size_t *src,
                               const size_t *dst,
                               const double *weight,
                               size_t m,
                               struct SnsrGraph **out);

// Graph from a text or `.json` graph file.
//
// # Safety
// `path` must be a NUL-terminated string.
enum SnsrStatus snsr_graph_load(const char *path, struct SnsrGraph **out);

// Node count, or 0 for a null handle.
//
// # Safety
// `g` must be null or a live graph handle.
size_t snsr_graph_node_count(const struct SnsrGraph *g);

// # Safety
// `g` must be null or a graph handle not yet freed.
void snsr_graph_free(struct SnsrGraph *g);

// Spectral bound used to rescale the Laplacian.
//
// # Safety
// `g` must be a live graph handle and `out` writable.
enum SnsrStatus snsr_lambda_max(const struct SnsrGraph *g, enum SnsrLaplacian kind, double *out);

// Chebyshev filter with coefficients `theta[0..len]`.
//
// # Safety
// `theta` must point to `len` readable doubles.
enum SnsrStatus snsr_filter_new(const double *theta,
                                size_t len,
                                double lambda_max,
                                struct SnsrFilter **out);

// Frequency response `h(lambda)`.
//
// # Safety
// `f` must be a live filter handle and `out` writable.
enum SnsrStatus snsr_filter_response(const struct SnsrFilter *f, double lambda, double *out);

// `y = h(L) x` via the Chebyshev recurrence; `x` and `y` hold `n` values
// where `n` is the graph's node count.
//
// # Safety
// Handles must be live; `x` readable and `y` writable for `n` doubles.
enum SnsrStatus snsr_filter_apply(const struct SnsrGraph *g,
                                  enum SnsrLaplacian kind,
                                  const struct SnsrFilter *f,
                                  const double *x,
                                  double *y,
                                  size_t n);

// # Safety
// `f` must be null or a filter handle not yet freed.
void snsr_filter_free(struct SnsrFilter *f);

// Knowledge base from its text form.
//
// # Safety
// `text` must be a NUL-terminated string.
enum SnsrStatus snsr_kb_parse(const char *text, struct SnsrKb **out);

// # Safety
// `kb` must be null or a KB handle not yet freed.
void snsr_kb_free(struct SnsrKb *kb);

// Freshly initialised pipeline from config text and rule text (either may
// be null for defaults / no rules).
//
// # Safety
// Non-null strings must be NUL-terminated.
enum SnsrStatus snsr_pipeline_new(const char *config, const char *rules, struct SnsrPipeline **out);

// Pipeline restored from a training checkpoint.
//
// # Safety
// `path` must be a NUL-terminated string.
enum SnsrStatus snsr_pipeline_load(const char *path, struct SnsrPipeline **out);

// Stages 1 and 2 plus thresholding: writes the filtered signal to `y`
// and 0/1 predicate truth to `truth` (either may be null).
//
// # Safety
// Handles must be live; `x` readable and `y`/`truth` writable for `n`
// elements.
enum SnsrStatus snsr_pipeline_predict(const struct SnsrPipeline *p,
                                      const struct SnsrGraph *g,
                                      const double *x,
                                      size_t n,
                                      double *y,
                                      uint8_t *truth);

// Full run; writes the answer atom ids (the closure) to `answers`.
// `*count` receives the number of answers; if it exceeds `capacity`
// nothing is written and `BufferTooSmall` is returned.
//
// # Safety
// Handles must be live; `x` readable for `n` doubles; `answers` writable
// for `capacity` elements; `count` writable.
enum SnsrStatus snsr_pipeline_run(const struct SnsrPipeline *p,
                                  const struct SnsrGraph *g,
                                  const double *x,
                                  size_t n,
                                  const struct SnsrKb *kb,
                                  size_t *answers,
                                  size_t capacity,
                                  size_t *count);

// # Safety
// `p` must be null or a pipeline handle not yet freed.
void snsr_pipeline_free(struct SnsrPipeline *p);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPECTRAL_NSR_H */
