/* C interface to the review-driven UI-deletion recommendation pipeline.
 *
 * Usage:
 *   rad_pipeline* p = rad_pipeline_new();
 *   rad_pipeline_set(p, "reviews", "reviews.jsonl");
 *   rad_pipeline_set(p, "releases", "releases.jsonl");
 *   rad_pipeline_set(p, "out", "out");
 *   if (rad_pipeline_run(p, "all") != RAD_OK)
 *       fprintf(stderr, "%s\n", rad_pipeline_last_error(p));
 *   rad_pipeline_free(p);
 *
 * All functions are thread-compatible: distinct handles may be used from
 * distinct threads; one handle must not be shared without synchronization.
 */
#ifndef RADIATION_H
#define RADIATION_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define RAD_API __declspec(dllexport)
#else
#define RAD_API __attribute__((visibility("default")))
#endif

typedef enum rad_status {
    RAD_OK = 0,
    /* Contract violation: bad config value, inconsistent inputs, missing
     * upstream artifact. Maps to process exit code 1. */
    RAD_VALIDATION_ERROR = 1,
    /* Unreadable or unwritable file or directory. Maps to exit code 2. */
    RAD_IO_ERROR = 2,
    /* Null handle or null required argument. */
    RAD_INVALID_ARGUMENT = 3
} rad_status;

/* Opaque pipeline handle: configuration plus the warning/error state of the
 * last run. */
typedef struct rad_pipeline rad_pipeline;

/* Library version, e.g. "0.1.0". Static storage; do not free. */
RAD_API const char* rad_version(void);

/* Space-separated subcommand names in pipeline order. Static storage. */
RAD_API const char* rad_subcommand_list(void);

RAD_API rad_pipeline* rad_pipeline_new(void);
RAD_API void rad_pipeline_free(rad_pipeline* pipeline);

/* Loads a key=value config file over the defaults. */
RAD_API rad_status rad_pipeline_load_config(rad_pipeline* pipeline, const char* path);

/* Sets one config key. Unknown keys are validation errors. */
RAD_API rad_status rad_pipeline_set(rad_pipeline* pipeline, const char* key, const char* value);

/* Copies the value of `key` into buf (NUL-terminated, truncated to buflen). */
RAD_API rad_status rad_pipeline_get(const rad_pipeline* pipeline, const char* key, char* buf,
                                    size_t buflen);

/* Runs one subcommand (or "all"). On failure the message is available via
 * rad_pipeline_last_error until the next call on this handle. */
RAD_API rad_status rad_pipeline_run(rad_pipeline* pipeline, const char* subcommand);

/* Message of the last failed call on this handle, or "" after success.
 * Owned by the handle; valid until the next call. */
RAD_API const char* rad_pipeline_last_error(const rad_pipeline* pipeline);

/* Warnings collected by the last run. */
RAD_API size_t rad_pipeline_warning_count(const rad_pipeline* pipeline);
RAD_API const char* rad_pipeline_warning(const rad_pipeline* pipeline, size_t index);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RADIATION_H */
