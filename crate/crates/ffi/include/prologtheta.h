#ifndef PROLOGTHETA_H
#define PROLOGTHETA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PtGroundness {
  PT_GROUNDNESS_STRICT = 0,
  PT_GROUNDNESS_LENIENT = 1,
} PtGroundness;

// Result codes.
typedef enum PtStatus {
  // Success; for `pt_solver_next`, a solution is available.
  PT_STATUS_OK = 0,
  // `pt_solver_next` found no further solution.
  PT_STATUS_NO_MORE = 1,
  // Load, parse or well-formedness error; see `pt_last_error_message`.
  PT_STATUS_ERROR = 2,
  // No further solution within the depth bound, but the search was cut off.
  PT_STATUS_INCOMPLETE = 3,
  PT_STATUS_NULL_ARGUMENT = 4,
  PT_STATUS_INVALID_UTF8 = 5,
  // Answer index out of range, or no current solution.
  PT_STATUS_OUT_OF_RANGE = 6,
  // An internal error was caught at the boundary.
  PT_STATUS_PANIC = 7,
} PtStatus;

// Opaque session handle.
typedef struct PtSession PtSession;

// Opaque handle for the solutions of one query.
typedef struct PtSolver PtSolver;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates an empty session. Release with `pt_session_free`.
struct PtSession *pt_session_new(void);

// # Safety
// `session` must come from `pt_session_new` and not be used afterwards.
void pt_session_free(struct PtSession *session);

// Loads a module from source text. `name` is used when the text has no
// `module` header.
//
// # Safety
// Pointers must be valid NUL-terminated strings and a live session.
enum PtStatus pt_session_load(struct PtSession *session, const char *name, const char *source);

// Loads a module file.
//
// # Safety
// `path` must be a valid NUL-terminated string and `session` live.
enum PtStatus pt_session_load_path(struct PtSession *session, const char *path);

// # Safety
// `session` must be live.
enum PtStatus pt_session_set_groundness(struct PtSession *session, enum PtGroundness mode);

// Bounds the proof-tree height; 0 removes the bound.
//
// # Safety
// `session` must be live.
enum PtStatus pt_session_set_max_depth(struct PtSession *session, uint32_t depth);

// # Safety
// `session` must be live.
enum PtStatus pt_session_set_occurs_check(struct PtSession *session, bool on);

// Whether free query variables are reported (the default) or silent.
//
// # Safety
// `session` must be live.
enum PtStatus pt_session_set_free_vars_noisy(struct PtSession *session, bool noisy);

// Starts a query. On success `*out` receives a solver, to be released with
// `pt_solver_free`. The solver stays valid after the session is freed.
//
// # Safety
// `session` must be live, `query` a valid string and `out` writable.
enum PtStatus pt_session_query(struct PtSession *session, const char *query, struct PtSolver **out);

// Advances to the next solution: `Ok` when one is available, `NoMore` or
// `Incomplete` when the search is over.
//
// # Safety
// `solver` must be live.
enum PtStatus pt_solver_next(struct PtSolver *solver);

// Number of bindings in the current answer, or 0 without a current solution.
//
// # Safety
// `solver` must be live or null.
size_t pt_solver_answer_count(const struct PtSolver *solver);

// Label of the `index`th answer variable (`Y`, or `Y#2` for a repeated name).
//
// # Safety
// `solver` must be live and `out` writable.
enum PtStatus pt_solver_answer_var(const struct PtSolver *solver, size_t index, char **out);

// The term bound to the `index`th answer variable.
//
// # Safety
// `solver` must be live and `out` writable.
enum PtStatus pt_solver_answer_term(const struct PtSolver *solver, size_t index, char **out);

// 1 if the current solution's answer is ground, 0 if not (lenient mode
// only), -1 without a current solution.
//
// # Safety
// `solver` must be live or null.
int32_t pt_solver_is_ground(const struct PtSolver *solver);

// The current solution's proof, one step per line, deepest first.
//
// # Safety
// `solver` must be live or null.
char *pt_solver_trace_text(const struct PtSolver *solver);

// The current solution as a JSON document (see docs/trace.schema.json).
//
// # Safety
// `solver` must be live or null.
char *pt_solver_json(const struct PtSolver *solver);

// # Safety
// `solver` must come from `pt_session_query` and not be used afterwards.
void pt_solver_free(struct PtSolver *solver);

// Copy of the last error message on this thread, or null if the last call
// succeeded.
char *pt_last_error_message(void);

// # Safety
// `s` must be a string returned by this library, or null.
void pt_string_free(char *s);

// Library version, a static string that must not be freed.
const char *pt_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PROLOGTHETA_H */
