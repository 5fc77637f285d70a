/*
 * C interface to the Hardy-inequality laboratory.
 *
 * All functions are thread-compatible: distinct handles may be used from
 * distinct threads. No function throws; failures surface as status codes
 * and messages.
 */
#ifndef HARDY_HARDY_H
#define HARDY_HARDY_H

#ifdef __cplusplus
extern "C" {
#endif

/* Opaque result of one run. Owned by the caller; release with hardy_free. */
typedef struct hardy_analysis hardy_analysis;

/*
 * Runs the tool with a JSON configuration (UTF-8, NUL-terminated; NULL or
 * "" means all defaults) in the given mode: "analyze", "sweep" or "verify".
 * A NULL or empty mode defers to the configuration's "mode" key. Never
 * returns NULL except on allocation failure, in which case
 * hardy_last_error() describes the problem.
 */
hardy_analysis* hardy_run(const char* config_json, const char* mode);

/*
 * Status of a run, mirroring the CLI exit codes:
 *   0 success,
 *   1 internal error,
 *   2 configuration or instance error,
 *   3 quadrature tolerance not reached,
 *   4 a verification check failed,
 *   5 the window is too small to resolve the requested quantity.
 */
int hardy_result_status(const hardy_analysis* a);

/* 1 when the status is 0, else 0. */
int hardy_result_ok(const hardy_analysis* a);

/*
 * The rendered report: a JSON document, or a CSV stream for sweep runs.
 * May be empty for failed runs. The pointer remains valid until hardy_free
 * is called on the same handle.
 */
const char* hardy_result_output(const hardy_analysis* a);

/* Diagnostic message for a non-zero status; "" on success. Same lifetime
 * as hardy_result_output. */
const char* hardy_result_error(const hardy_analysis* a);

/* Releases a handle. NULL is allowed. */
void hardy_free(hardy_analysis* a);

/*
 * Thread-local description of the most recent API-level misuse seen by this
 * thread (NULL handle, allocation failure); "" when none.
 */
const char* hardy_last_error(void);

/* Version string of the library, e.g. "1.0.0". Static storage. */
const char* hardy_version(void);

#ifdef __cplusplus
}
#endif

#endif /* HARDY_HARDY_H */
