#ifndef DUALIS_H
#define DUALIS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a library call.
 */
typedef enum {
  DUALIS_STATUS_OK = 0,
  DUALIS_STATUS_NULL_POINTER = 1,
  DUALIS_STATUS_INVALID_UTF8 = 2,
  DUALIS_STATUS_PARSE = 3,
  DUALIS_STATUS_INVALID_INPUT = 4,
  DUALIS_STATUS_NOT_PLANAR = 5,
  DUALIS_STATUS_BUDGET = 6,
  DUALIS_STATUS_PANIC = 7,
} DualisStatus;

/**
 * A multigraph, optionally with a rotation system.
 */
typedef struct DualisGraph DualisGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *dualis_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dualis_version(void);

/**
 * Parses a graph in the text format (with or without rotations).
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` a valid pointer.
 */
DualisStatus dualis_graph_parse(const char *source, DualisGraph **out);

/**
 * Releases a graph handle. NULL is ignored.
 *
 * # Safety
 * `graph` must come from this library and not have been freed.
 */
void dualis_graph_free(DualisGraph *graph);

/**
 * Number of vertices, or 0 for NULL.
 *
 * # Safety
 * `graph` must be NULL or a live handle.
 */
size_t dualis_graph_vertex_count(const DualisGraph *graph);

/**
 * Number of edges, or 0 for NULL.
 *
 * # Safety
 * `graph` must be NULL or a live handle.
 */
size_t dualis_graph_edge_count(const DualisGraph *graph);

/**
 * Serializes a graph (with its rotation, if any). Free the result with
 * `dualis_string_free`.
 *
 * # Safety
 * `graph` must be a live handle and `out` a valid pointer.
 */
DualisStatus dualis_graph_write(const DualisGraph *graph, char **out);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void dualis_string_free(char *s);

/**
 * Replaces the graph's rotation by a computed planar embedding.
 *
 * # Safety
 * `graph` must be a live handle.
 */
DualisStatus dualis_graph_embed(DualisGraph *graph);

/**
 * Dual of an embedded graph, with its induced rotation. A graph without
 * a rotation is embedded first.
 *
 * # Safety
 * `graph` must be a live handle and `out` a valid pointer.
 */
DualisStatus dualis_graph_dual(const DualisGraph *graph, DualisGraph **out);

/**
 * Whether `g2` is a dual of `g1`; both must be biconnected and planar.
 *
 * # Safety
 * `g1`, `g2` must be live handles and `out` a valid pointer.
 */
DualisStatus dualis_mutual_duality(const DualisGraph *g1, const DualisGraph *g2, bool *out);

/**
 * Whether a biconnected planar graph is isomorphic to one of its duals.
 *
 * # Safety
 * `graph` must be a live handle and `out` a valid pointer.
 */
DualisStatus dualis_graph_self_dual(const DualisGraph *graph, bool *out);

/**
 * Generates the mutual-duality pair for a 3-Partition instance given as
 * text (`B <int>` then `A <ints>`).
 *
 * # Safety
 * `instance` must be a NUL-terminated string; `g1`, `g2` valid pointers.
 */
DualisStatus dualis_gen_3partition(const char *instance,
                                   bool simple,
                                   DualisGraph **g1,
                                   DualisGraph **g2);

/**
 * Decides the generated pair of a 3-Partition instance by enumerating
 * star-to-face assignments, within `budget` steps.
 *
 * # Safety
 * `instance` must be a NUL-terminated string and `out` a valid pointer.
 */
DualisStatus dualis_verify_3partition(const char *instance, uint64_t budget, bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DUALIS_H */
