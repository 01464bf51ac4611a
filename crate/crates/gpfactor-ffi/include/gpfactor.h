#ifndef GPFACTOR_H
#define GPFACTOR_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GpfStatus {
  GPF_STATUS_OK = 0,
  GPF_STATUS_NULL_POINTER = 1,
  GPF_STATUS_VALIDATION = 2,
  GPF_STATUS_CAP = 3,
  GPF_STATUS_INVALID_UTF8 = 4,
  GPF_STATUS_PANIC = 5,
} GpfStatus;

/**
 * Parsed and validated input document.
 */
typedef struct GpfDocument GpfDocument;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a JSON input document. On success `*out` owns a new handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GpfStatus gpf_document_parse(const char *json, struct GpfDocument **out);

/**
 * Releases a handle from [`gpf_document_parse`]. Null is ignored.
 *
 * # Safety
 * `doc` must come from [`gpf_document_parse`] and not be used afterwards.
 */
void gpf_document_free(struct GpfDocument *doc);

/**
 * Number of vertices in the document, or -1 for a null handle.
 *
 * # Safety
 * `doc` must be null or a live handle.
 */
int64_t gpf_document_vertex_count(const struct GpfDocument *doc);

/**
 * Full structural report as canonical JSON in `*out`.
 *
 * # Safety
 * `doc` must be a live handle and `out` a valid pointer.
 */
enum GpfStatus gpf_analyze(const struct GpfDocument *doc, char **out);

/**
 * Irreducible and connected components as canonical JSON in `*out`.
 *
 * # Safety
 * `doc` must be a live handle and `out` a valid pointer.
 */
enum GpfStatus gpf_components(const struct GpfDocument *doc, char **out);

/**
 * Growth counts `|{w : |w| = n}|` for `n ≤ max_len` as canonical JSON in `*out`.
 *
 * # Safety
 * `doc` must be a live handle and `out` a valid pointer.
 */
enum GpfStatus gpf_growth_counts(const struct GpfDocument *doc, uint32_t max_len, char **out);

/**
 * Whether the graph is rigid: 1 yes, 0 no, -1 null handle or invalid graph.
 *
 * # Safety
 * `doc` must be null or a live handle.
 */
int32_t gpf_is_rigid(const struct GpfDocument *doc);

/**
 * Releases a string returned through an `out` parameter. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void gpf_string_free(char *s);

/**
 * Message for the last failure on this thread, or null. Valid until the next call.
 */
const char *gpf_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gpf_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GPFACTOR_H */
