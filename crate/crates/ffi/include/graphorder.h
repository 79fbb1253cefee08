#ifndef GRAPHORDER_H
#define GRAPHORDER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GordStatus {
  GORD_STATUS_OK = 0,
  GORD_STATUS_NULL_POINTER = 1,
  GORD_STATUS_INVALID_ARGUMENT = 2,
  GORD_STATUS_PARSE = 3,
  GORD_STATUS_IO = 4,
  GORD_STATUS_REFUSED = 5,
  GORD_STATUS_NON_FINITE = 6,
  GORD_STATUS_CHECKPOINT = 7,
  GORD_STATUS_BUFFER_TOO_SMALL = 8,
  GORD_STATUS_PANIC = 9,
} GordStatus;

typedef enum GordPartitionMethod {
  GORD_PARTITION_METHOD_ORDER_SWEEP = 0,
  GORD_PARTITION_METHOD_RANDOM = 1,
  GORD_PARTITION_METHOD_GREEDY = 2,
} GordPartitionMethod;

/**
 * Opaque graph handle.
 */
typedef struct GordGraph GordGraph;

/**
 * Opaque DON model handle.
 */
typedef struct GordModel GordModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *gord_last_error(void);

/**
 * Builds a graph from `len` arcs `src[i] -> dst[i]`. Self-loops and repeated
 * arcs are dropped.
 *
 * # Safety
 * `src` and `dst` must point to `len` readable values; `out` must be writable.
 */
enum GordStatus gord_graph_from_arcs(size_t n,
                                     const size_t *src,
                                     const size_t *dst,
                                     size_t len,
                                     struct GordGraph **out);

/**
 * Parses edge-list text.
 *
 * # Safety
 * `text` must be a nul-terminated string; `out` must be writable.
 */
enum GordStatus gord_graph_parse(const char *text, struct GordGraph **out);

/**
 * Reads an edge-list file.
 *
 * # Safety
 * `path` must be a nul-terminated string; `out` must be writable.
 */
enum GordStatus gord_graph_read(const char *path, struct GordGraph **out);

/**
 * # Safety
 * `g` must come from a graph constructor and not be freed twice. Null is a no-op.
 */
void gord_graph_free(struct GordGraph *g);

/**
 * # Safety
 * `g` must be a live graph handle or null (returns 0).
 */
size_t gord_graph_vertex_count(const struct GordGraph *g);

/**
 * # Safety
 * `g` must be a live graph handle or null (returns 0).
 */
size_t gord_graph_arc_count(const struct GordGraph *g);

/**
 * Number of undirected edges, the length partition outputs use.
 *
 * # Safety
 * `g` must be a live graph handle or null (returns 0).
 */
size_t gord_graph_edge_count(const struct GordGraph *g);

/**
 * # Safety
 * `g` must be a live graph handle; `out` must be writable.
 */
enum GordStatus gord_similarity(const struct GordGraph *g, size_t u, size_t v, uint64_t *out);

/**
 * Window score of `order` (a permutation of all vertices).
 *
 * # Safety
 * `g` must be live; `order` must hold `len` values; `out` must be writable.
 */
enum GordStatus gord_f_score(const struct GordGraph *g,
                             const size_t *order,
                             size_t len,
                             size_t w,
                             uint64_t *out);

/**
 * Greedy window ordering written to `out` (capacity `cap`, needs n).
 *
 * # Safety
 * `g` must be live; `out` must have room for `cap` values.
 */
enum GordStatus gord_go_order(const struct GordGraph *g, size_t w, size_t *out, size_t cap);

/**
 * Vertices by decreasing total degree.
 *
 * # Safety
 * `g` must be live; `out` must have room for `cap` values.
 */
enum GordStatus gord_degree_order(const struct GordGraph *g, size_t *out, size_t cap);

/**
 * Non-empty `b x b` blocks of the permuted adjacency matrix and their share
 * of all blocks.
 *
 * # Safety
 * `g` must be live; `order` must hold `len` values; outputs must be writable.
 */
enum GordStatus gord_compression_cost(const struct GordGraph *g,
                                      const size_t *order,
                                      size_t len,
                                      size_t b,
                                      size_t *out_nonzero,
                                      double *out_ratio);

/**
 * Partitions the undirected edges into `k` parts and reports the
 * replication factor. `order` is read only by the order sweep and may be
 * null otherwise; `seed` is read only by the random method. When
 * `out_parts` is non-null it receives one part id per edge, edges sorted by
 * `(min, max)` endpoint, and must hold [`gord_graph_edge_count`] entries.
 *
 * # Safety
 * `g` must be live; pointer arguments must be valid for their lengths.
 */
enum GordStatus gord_partition(const struct GordGraph *g,
                               enum GordPartitionMethod method,
                               size_t k,
                               const size_t *order,
                               size_t len,
                               uint64_t seed,
                               size_t *out_parts,
                               size_t parts_cap,
                               double *out_rf);

/**
 * Loads a DON checkpoint.
 *
 * # Safety
 * `path` must be a nul-terminated string; `out` must be writable.
 */
enum GordStatus gord_model_load(const char *path, struct GordModel **out);

/**
 * # Safety
 * `m` must come from [`gord_model_load`] and not be freed twice. Null is a no-op.
 */
void gord_model_free(struct GordModel *m);

/**
 * # Safety
 * `m` must be a live model handle or null (returns 0).
 */
size_t gord_model_vertex_count(const struct GordModel *m);

/**
 * Ordering decoded with the model, starting from the highest-degree vertex.
 *
 * # Safety
 * `m` and `g` must be live; `out` must have room for `cap` values.
 */
enum GordStatus gord_don_order(const struct GordModel *m,
                               const struct GordGraph *g,
                               size_t w,
                               size_t *out,
                               size_t cap);

/**
 * Library version as a static nul-terminated string.
 */
const char *gord_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRAPHORDER_H */
