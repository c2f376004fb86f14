#ifndef FIBSUM_H
#define FIBSUM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Which side of an identity [`fibsum_eval`] evaluates.
typedef enum FibsumSide {
  FIBSUM_SIDE_LHS = 0,
  FIBSUM_SIDE_RHS = 1,
} FibsumSide;

// Result codes shared by every entry point.
typedef enum FibsumStatus {
  FIBSUM_STATUS_OK = 0,
  // A required pointer argument was null.
  FIBSUM_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  FIBSUM_STATUS_INVALID_UTF8 = 2,
  // Identity text, binding, grid or catalog file did not parse.
  FIBSUM_STATUS_PARSE = 3,
  FIBSUM_STATUS_IO = 4,
  FIBSUM_STATUS_UNKNOWN_ID = 5,
  // The identity could not be evaluated at the given binding.
  FIBSUM_STATUS_EVAL = 6,
  // An internal panic was caught at the boundary.
  FIBSUM_STATUS_INTERNAL = 7,
} FibsumStatus;

// A loaded catalog. Opaque to C.
typedef struct FibsumCatalog FibsumCatalog;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until
// the next call into the library from this thread.
const char *fibsum_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a pointer this library returned and not yet freed.
void fibsum_string_free(char *s);

// Writes F(j) in decimal to `*out`.
//
// # Safety
// `out` must be valid for a pointer write.
enum FibsumStatus fibsum_fib(int64_t j, char **out);

// Writes L(j) in decimal to `*out`.
//
// # Safety
// `out` must be valid for a pointer write.
enum FibsumStatus fibsum_lucas(int64_t j, char **out);

// Evaluates one side of the identity in `source` (one `identity` block)
// at `binding` (`"n=2,s=0"`, may be empty) and writes the value, e.g.
// `"3/2 + 1/2*sqrt5"`, to `*out`.
//
// # Safety
// `source` and `binding` must be NUL-terminated strings; `out` must be
// valid for a pointer write.
enum FibsumStatus fibsum_eval(const char *source,
                              const char *binding,
                              enum FibsumSide side,
                              char **out);

// Loads the catalog under `dir`, or the default catalog when `dir` is
// null, into `*out`.
//
// # Safety
// `dir` must be null or a NUL-terminated string; `out` must be valid for
// a pointer write.
enum FibsumStatus fibsum_catalog_open(const char *dir, struct FibsumCatalog **out);

// Releases a catalog. Null is ignored.
//
// # Safety
// `catalog` must be null or a handle from [`fibsum_catalog_open`] not yet
// freed.
void fibsum_catalog_free(struct FibsumCatalog *catalog);

// Number of entries, or 0 for a null handle.
//
// # Safety
// `catalog` must be null or a live handle.
size_t fibsum_catalog_len(const struct FibsumCatalog *catalog);

// Verifies entry `id` over its default grid laid under `grid` (e.g.
// `"n=0..10;cap=500"`, or null). Writes whether it passed to `*passed`
// and, if `report` is not null, the rendered report to `*report`.
//
// # Safety
// `catalog` must be a live handle; `id` and `grid` NUL-terminated (grid
// may be null); `passed` valid for a write; `report` null or valid for a
// pointer write.
enum FibsumStatus fibsum_verify(const struct FibsumCatalog *catalog,
                                const char *id,
                                const char *grid,
                                bool *passed,
                                char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FIBSUM_H */
