#ifndef SCP_H
#define SCP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum ScpStatus {
  SCP_STATUS_OK = 0,
  // A required pointer argument was NULL.
  SCP_STATUS_NULL_POINTER = 1,
  // An input string was not valid UTF-8.
  SCP_STATUS_INVALID_UTF8 = 2,
  // The DSL source failed to parse.
  SCP_STATUS_PARSE = 3,
  // The instance failed validation.
  SCP_STATUS_INVALID_INSTANCE = 4,
  // Two constraints disagree on a cell.
  SCP_STATUS_CONTRADICTION = 5,
  // Enumeration would exceed the requested cap.
  SCP_STATUS_CAP_EXCEEDED = 6,
  // A set name is not part of the instance.
  SCP_STATUS_UNKNOWN_SET = 7,
  // A target assignment is malformed, has the wrong shape, or is unreachable.
  SCP_STATUS_INVALID_TARGET = 8,
  // A row or column index is out of range.
  SCP_STATUS_OUT_OF_RANGE = 9,
  // An internal panic was caught.
  SCP_STATUS_PANIC = 10,
} ScpStatus;

// Opaque parsed instance.
typedef struct ScpInstance ScpInstance;

// Opaque ternary matrix built from an instance.
typedef struct ScpMatrix ScpMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or NULL if none.
//
// The pointer stays valid until the next failing call on the same thread.
// Do not free it.
const char *scp_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *scp_version(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must be NULL or a pointer obtained from this library and not yet freed.
void scp_string_free(char *s);

// Parses DSL source into a new instance handle.
//
// # Safety
// `source` must be NULL or a valid NUL-terminated string; `out` must be NULL
// or valid for writes.
enum ScpStatus scp_instance_parse(const char *source, struct ScpInstance **out);

// # Safety
// `instance` must be NULL or a handle from [`scp_instance_parse`] not yet freed.
void scp_instance_free(struct ScpInstance *instance);

// Renders the instance back to canonical DSL text.
//
// # Safety
// `instance` must be a live instance handle; `out` must be valid for writes.
enum ScpStatus scp_instance_to_dsl(const struct ScpInstance *instance, char **out);

// Applies every constraint of `instance` and returns a new matrix handle.
//
// # Safety
// `instance` must be a live instance handle; `out` must be valid for writes.
enum ScpStatus scp_matrix_build(const struct ScpInstance *instance, struct ScpMatrix **out);

// # Safety
// `matrix` must be NULL or a handle from [`scp_matrix_build`] not yet freed.
void scp_matrix_free(struct ScpMatrix *matrix);

// Writes the number of elements (rows) and sets (columns).
//
// # Safety
// `matrix` must be a live handle; `rows` and `cols` must be valid for writes.
enum ScpStatus scp_matrix_dims(const struct ScpMatrix *matrix, size_t *rows, size_t *cols);

// Writes the cell value: 1 for member, -1 for non-member, 0 for uncertain.
//
// # Safety
// `matrix` must be a live handle; `value` must be valid for writes.
enum ScpStatus scp_matrix_get(const struct ScpMatrix *matrix,
                              size_t row,
                              size_t col,
                              int8_t *value);

// Writes the number of uncertain cells.
//
// # Safety
// `matrix` must be a live handle; `count` must be valid for writes.
enum ScpStatus scp_matrix_uncertain_count(const struct ScpMatrix *matrix, size_t *count);

// `{"elements": [...], "sets": [...], "entries": [[1, -1, 0], ...]}`.
//
// # Safety
// `matrix` must be a live handle; `out` must be valid for writes.
enum ScpStatus scp_matrix_to_json(const struct ScpMatrix *matrix, char **out);

// Lifted matrix as JSON, with `"in"`, `"out"` or `"superposed"` per cell.
//
// # Safety
// `matrix` must be a live handle; `out` must be valid for writes.
enum ScpStatus scp_quantum_to_json(const struct ScpMatrix *matrix, char **out);

// One set as a sum of kets, e.g. `X = |0>.(a+d) + |1>.(b+c+f) + ...`.
//
// # Safety
// `matrix` must be a live handle; `set` a NUL-terminated string; `out` valid for writes.
enum ScpStatus scp_set_expression(const struct ScpMatrix *matrix, const char *set, char **out);

// `{"set", "uncertain", "variants": [{"name", "index", "members"}]}` for one set.
//
// # Safety
// `matrix` must be a live handle; `set` a NUL-terminated string; `out` valid for writes.
enum ScpStatus scp_variants_json(const struct ScpMatrix *matrix,
                                 const char *set,
                                 uint32_t cap,
                                 char **out);

// Every consistent completion: `{"elements", "sets", "uncertain_cells", "completions"}`.
//
// Each completion is an array of bit rows, 0 for member and 1 for non-member.
//
// # Safety
// `matrix` must be a live handle; `out` must be valid for writes.
enum ScpStatus scp_completions_json(const struct ScpMatrix *matrix, uint32_t cap, char **out);

// Runs exactly `rounds` measurement rounds and reports per-cell member frequencies.
//
// # Safety
// `matrix` must be a live handle; `out` must be valid for writes.
enum ScpStatus scp_sample_json(const struct ScpMatrix *matrix,
                               uint64_t seed,
                               uint64_t rounds,
                               char **out);

// Samples until the register measures `target_json` (an array of bit rows).
//
// `max_rounds == 0` selects the default budget of `2^(u+4)` rounds, where `u`
// is the number of uncertain cells.
//
// # Safety
// `matrix` must be a live handle; `target_json` a NUL-terminated string;
// `out` valid for writes.
enum ScpStatus scp_sample_until_json(const struct ScpMatrix *matrix,
                                     const char *target_json,
                                     uint64_t seed,
                                     uint64_t max_rounds,
                                     char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCP_H */
